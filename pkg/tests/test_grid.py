import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavemaplab.errors import ConfigError
from wavemaplab.grid import (build_grid, integrate, interpolate, lambda_op, radial_laplacian,
                             sobolev_norm)


def test_nodes():
    g = build_grid(8, 5)
    assert g.nodes[0] == 1.0 and g.nodes[-1] == 0.0
    assert g.nodes[1] == pytest.approx(math.cos(math.pi / 16), abs=1e-15)
    assert np.all(np.diff(g.nodes) < 0)
    with pytest.raises(ConfigError):
        build_grid(7, 5)


def test_quadrature(grid16):
    r = grid16.nodes
    assert integrate(grid16, r ** 2) == pytest.approx(1 / 7, abs=1e-12)
    assert integrate(grid16, np.ones_like(r)) == pytest.approx(1 / 5, abs=1e-12)
    for m in range(0, 9):
        assert integrate(grid16, r ** (2 * m)) == pytest.approx(1 / (2 * m + 5), abs=1e-12)


def test_derivative_invariants(grid32):
    r = grid32.nodes
    assert np.max(np.abs(grid32.D1 @ np.ones_like(r))) <= 1e-12 * 32
    assert np.max(np.abs(grid32.D1 @ r ** 2 - 2 * r)) <= 1e-10


def test_spectral_accuracy():
    g = build_grid(24, 5)
    f = np.exp(-g.nodes ** 2)
    assert np.max(np.abs(g.D1 @ f + 2 * g.nodes * f)) <= 1e-10


def test_second_derivative_is_derivative_squared(grid16):
    # D1 maps even to odd samples, D1_odd maps back
    assert np.max(np.abs(grid16.D2 - grid16.D1_odd @ grid16.D1)) <= 1e-8 * 16 ** 2


def test_lambda_examples(grid16):
    r = grid16.nodes
    assert np.allclose(lambda_op(grid16, np.ones_like(r)), 0, atol=1e-12)
    assert np.allclose(lambda_op(grid16, r ** 2), 2 * r ** 2, atol=1e-12)
    assert np.allclose(lambda_op(grid16, (1 - r ** 2) ** 2), -4 * r ** 2 * (1 - r ** 2), atol=1e-12)
    assert lambda_op(grid16, np.cos(r))[-1] == 0.0


def test_laplacian_examples(grid16):
    r = grid16.nodes
    assert np.allclose(radial_laplacian(grid16, r ** 2), 10, atol=1e-10)
    assert np.allclose(radial_laplacian(grid16, np.ones_like(r)), 0, atol=1e-9)
    assert radial_laplacian(grid16, r ** 4)[0] == pytest.approx(28, abs=1e-9)
    g7 = build_grid(16, 7)
    assert np.allclose(radial_laplacian(g7, g7.nodes ** 2), 14, atol=1e-10)


def test_operators_preserve_even_polynomials(grid16):
    """Outputs on even polynomials are even polynomials: their odd Chebyshev content is nil."""
    r = grid16.nodes
    n = grid16.n_modes
    f = 1 + r ** 2 - 3 * r ** 6 + r ** 10
    full_x = np.concatenate([r, -r[:n][::-1]])
    for out in (lambda_op(grid16, f), radial_laplacian(grid16, f)):
        full = np.concatenate([out, out[:n][::-1]])
        coeffs = np.polynomial.chebyshev.chebfit(full_x, full, 2 * n)
        assert np.max(np.abs(coeffs[1::2])) <= 1e-10


def test_sobolev_examples(grid16):
    r = grid16.nodes
    assert sobolev_norm(grid16, np.ones_like(r), 0) == pytest.approx(1 / math.sqrt(5), abs=1e-12)
    assert sobolev_norm(grid16, 0 * r, 3) == 0.0
    assert sobolev_norm(grid16, r ** 2, 0) == pytest.approx(1 / 3, abs=1e-12)
    # f = r^2: f' = 2r, f'' = 2 -> 1/9 + 4/7 + 4/5
    assert sobolev_norm(grid16, r ** 2, 2) == pytest.approx(math.sqrt(1 / 9 + 4 / 7 + 4 / 5), abs=1e-10)
    with pytest.raises(ConfigError):
        sobolev_norm(grid16, r, 5)


def test_interpolation(grid16):
    r = grid16.nodes
    f = np.cos(3 * r)
    assert interpolate(grid16, f, r[5]) == f[5]
    assert interpolate(grid16, r ** 2, 0.3) == pytest.approx(0.09, abs=1e-12)
    assert interpolate(grid16, (1 - r ** 2) ** 3, 0.7) == pytest.approx(0.51 ** 3, abs=1e-12)
    with pytest.raises(ValueError):
        interpolate(grid16, f, 1.5)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8), st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_interpolation_reproduces_even_polynomials(coeffs, x):
    g = build_grid(16, 5)
    p = lambda r: sum(c * r ** (2 * i) for i, c in enumerate(coeffs))
    assert interpolate(g, p(g.nodes), x) == pytest.approx(p(x), abs=1e-11 * (1 + sum(map(abs, coeffs))))


def test_shape_mismatch(grid16):
    with pytest.raises(ValueError):
        lambda_op(grid16, np.ones(5))

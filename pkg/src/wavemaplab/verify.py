"""Self-check suite behind ``wavemaplab verify``.

Every item measures one number and compares it with a tolerance; the report
line is ``ITEM <name> PASS|FAIL <measured> <tolerance>``.  For ``d = 3`` only
the free-flow items run, since the explicit solution needs ``d >= 5``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import evolve, model, modes
from .geometry import CartesianPoint, HyperboloidalPoint, cartesian_to_fhsc, fhsc_to_cartesian
from .grid import build_grid


@dataclass(frozen=True)
class Item:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"ITEM {self.name} {status} {self.measured:.3e} {self.tolerance:.3e}"


def geometry_roundtrip(rng, n=1000) -> float:
    """Max relative error of Cartesian -> FHSC -> Cartesian on random future points."""
    s = rng.uniform(0.0, 5.0, n)
    y = rng.uniform(0.0, 1.0 - 1e-6, n)
    p = fhsc_to_cartesian(HyperboloidalPoint(s, y))
    back = fhsc_to_cartesian(cartesian_to_fhsc(CartesianPoint(p.t, p.x_norm)))
    return float(max(np.max(np.abs(back.t - p.t) / p.t),
                     np.max(np.abs(back.x_norm - p.x_norm) / p.t)))


def explicit_residual(rng, d, n=100) -> float:
    t = rng.uniform(1.0, 3.0, n)
    r = rng.uniform(0.0, 0.9, n) * t
    return max(abs(model.cartesian_residual(lambda tt, rr: model.u_star(tt, rr, d), ti, ri, d))
               for ti, ri in zip(t, r))


def free_eigenpair_residuals(params, N=32):
    """Backward errors ``||A v - lambda v|| / (||A|| ||v||)`` (max norms) of the exact
    pairs ``(1, 0) -> -(d-2)`` and ``(1, -1) -> -(d-1)``.

    The second-derivative entries grow like ``N^4``, so the unscaled residual is
    limited by roundoff in the matrix-vector product, not by the pair.
    """
    grid = build_grid(N, params.d)
    a = modes.discretize_generator(grid, params, include_potential=False)
    one = np.ones(grid.size)
    scale = float(np.max(np.abs(a).sum(axis=1)))
    out = []
    for v, lam in ((np.concatenate([one, 0 * one]), -(params.d - 2)),
                   (np.concatenate([one, -one]), -(params.d - 1))):
        out.append(float(np.max(np.abs(a @ v - lam * v))) / scale)
    return out


def free_decay_error(params, N=16, s_max=1.0) -> float:
    config = evolve.EvolutionConfig(params=params, N=N, s_max=s_max, include_potential=False,
                                    include_nonlinearity=False, record_every=8)
    grid = build_grid(N, params.d)
    series = evolve.evolve(config, evolve.polynomial_data(grid, 1.0, 0.0, p=0), grid,
                           keep_states=True)
    return max(float(np.max(np.abs(st.q1 - math.exp(-(params.d - 2) * st.s))))
               for st in series.states)


def g0_residual(d) -> float:
    r = np.linspace(1e-2, 1 - 1e-3, 60)
    return float(modes.reduced_residual(modes.g0_profile, d, r).max()
                 / np.max(np.abs(modes.g0_profile(r, d))))


def frobenius_mismatches(d) -> int:
    """Exact mismatches between smooth-form and reduced-form exponents shifted by ``h``."""
    bad = 0
    for lam in (0, -1, 4 - d, Fraction(1, 2)):
        prob = modes.ModeProblem(lam, d)
        h0, h1 = modes.liouville_exponents(d, lam)
        for endpoint, shift in ((0, h0), (1, h1)):
            smooth = set(modes.frobenius_indices(prob, endpoint, "smooth"))
            reduced = {e + shift for e in modes.frobenius_indices(prob, endpoint, "reduced")}
            bad += smooth != reduced
    return bad


def generator_rhs_mismatch(params, rng, N=24) -> float:
    grid = build_grid(N, params.d)
    a = modes.discretize_generator(grid, params, include_potential=True)
    q1, q2 = rng.standard_normal((2, grid.size))
    dq = evolve.rhs(grid, params, evolve.EvolutionState(0.0, q1, q2), include_nonlinearity=False)
    diff = a @ np.concatenate([q1, q2]) - np.concatenate(dq)
    return float(np.max(np.abs(diff)) / np.max(np.abs(a)))


def remainder_quadratic(d, rng) -> float:
    """Relative change of ``N(eps phi)/eps^2`` between ``eps`` and ``eps/2``; O(eps) if quadratic."""
    r = np.linspace(0.0, 1.0, 41)
    phi = rng.standard_normal(r.size)
    eps = 1e-4
    a = model.nonlinear_remainder(r, eps * phi, d) / eps ** 2
    b = model.nonlinear_remainder(r, 0.5 * eps * phi, d) / (0.5 * eps) ** 2
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def run_checks(d: int = 5, k: int | None = None, seed: int = 0,
               tol_scale: float = 1.0) -> list[Item]:
    rng = np.random.default_rng(seed)
    free = d < 5
    params = model.ModelParams.relaxed(d, k) if free else model.ModelParams(d, k)
    items = [Item("geometry_roundtrip", geometry_roundtrip(rng), 1e-12)]
    res_10, res_11 = free_eigenpair_residuals(params)
    items += [Item("free_eigenpair_1_0", res_10, 1e-10),
              Item("free_eigenpair_1_m1", res_11, 1e-10),
              Item("free_decay", free_decay_error(params), 1e-8)]
    if not free:
        items += [
            Item("explicit_residual", explicit_residual(rng, d), 1e-8),
            Item("g0_residual", g0_residual(d), 1e-8),
            Item("frobenius_tables", frobenius_mismatches(d), 0.0),
            Item("generator_rhs_consistency", generator_rhs_mismatch(params, rng), 1e-13),
            Item("remainder_quadratic", remainder_quadratic(d, rng), 1e-3),
        ]
    return [Item(it.name, it.measured, it.tolerance * tol_scale) for it in items]

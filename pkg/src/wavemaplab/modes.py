"""Mode stability of the linearized flow.

A mode ``(lambda I - L) f = 0`` with ``Re lambda > -1`` gives a solution of the
smooth-form mode ODE for ``q1`` that is regular at both ends of [0, 1].  The
substitution ``f = h g`` with ``h = r^((1-d)/2) (1-r^2)^((1-d-2 lambda)/4)``
turns it into the Liouville form

    tau g = -(1/w) (g'' + q g) = mu g,   mu = -(lambda + 1)(lambda + d - 4),
    w = (1-r^2)^(-2),

which is limit-point at both ends.  ``g0`` solves ``tau g0 = 0`` without zeros
in (0, 1); by Sturm comparison the solution regular at 0 has no zeros for
any ``mu <= 0``, and zero counting then excludes eigenvalues ``mu < 0``.
Numerically this is certified by shooting from a Frobenius start near 0.

The matrix spectrum of the discretized generator is a cross-check only.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from . import model
from .errors import DomainError, IntegrationError
from .evolve import coefficient_generator
from .grid import RadialGrid, build_grid

GROWTH_EPS = 0.01


@dataclass(frozen=True)
class ModeProblem:
    lam: complex
    d: int

    def __post_init__(self):
        model._check_dim(self.d, minimum=5)


@dataclass(frozen=True)
class ReducedProblem:
    mu: float
    d: int

    def __post_init__(self):
        model._check_dim(self.d, minimum=5)


@dataclass
class ShootResult:
    zero_count: int
    r: np.ndarray
    g: np.ndarray
    terminal_r: float
    next_term: float = 0.0  # first omitted Frobenius term at r_start, relative to g
    dense: object = field(default=None, repr=False)

    @property
    def samples(self):
        return list(zip(self.r.tolist(), self.g.tolist()))

    def __call__(self, r):
        """Dense-output evaluation of ``g``."""
        return self.dense(r)[0]


@dataclass
class Certificate:
    d: int
    mu_samples: list
    zero_counts: list
    verdict: str
    failing_mu: float | None = None


@dataclass
class SpectrumReport:
    d: int
    k: int
    eigenvalues: np.ndarray
    resolved_mask: np.ndarray
    abscissa: float | None
    free_growth_bound: float

    @property
    def resolved(self) -> np.ndarray:
        return self.eigenvalues[self.resolved_mask]


def mu_of_lambda(lam, d):
    return -(lam + 1) * (lam + d - 4)


def free_growth_bound(d: int, k: int, eps: float = GROWTH_EPS) -> float:
    """``max(d/2 - k, eps) - (d - 2)``, the growth exponent of the free flow in ``H^k``."""
    return max(d / 2 - k, eps) - (d - 2)


# Frobenius data ---------------------------------------------------------------

def _exact(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return x


def _sqrt(x):
    if isinstance(x, Fraction) and x >= 0:
        num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if num * num == x.numerator and den * den == x.denominator:
            return Fraction(num, den)
        return math.sqrt(x)
    return cmath.sqrt(x) if (isinstance(x, complex) or x < 0) else math.sqrt(x)


def frobenius_indices(problem, endpoint: int, form: str):
    """Characteristic exponents of the mode ODE at ``endpoint`` (0 or 1).

    ``problem`` is a ModeProblem or ReducedProblem.  ``form='smooth'`` is the
    equation for ``q1`` (exponents in ``r`` resp. ``1 - r``) and needs lambda;
    ``form='reduced'`` is the Liouville form in ``g``.  Integer and Fraction
    inputs give exact Fractions whenever the discriminant is a rational square.
    """
    d = problem.d
    lam = getattr(problem, "lam", None)
    mu = getattr(problem, "mu", None)
    if endpoint not in (0, 1):
        raise ValueError("endpoint must be 0 or 1")
    half = Fraction(1, 2)
    if form == "smooth":
        if endpoint == 0:
            return (Fraction(0), Fraction(2 - d))
        if lam is None:
            raise ValueError("smooth form at r=1 needs lambda")
        return (Fraction(0), -_exact(lam) - (d - 3) * half)
    if form != "reduced":
        raise ValueError(f"unknown form {form!r}")
    if endpoint == 0:
        return ((d - 1) * half, -(d - 3) * half)
    if mu is None:
        if lam is None:
            raise ValueError("reduced form at r=1 needs mu or lambda")
        mu = mu_of_lambda(_exact(lam), d)
    mu = _exact(mu)
    root = _sqrt((d - 5) ** 2 - 4 * mu)
    return ((2 + root) / 4, (2 - root) / 4)


def liouville_exponents(d: int, lam):
    """Exponents of ``h`` at 0 (in r) and at 1 (in 1 - r)."""
    return (Fraction(1 - d, 2), (1 - d - 2 * _exact(lam)) / Fraction(4))


def liouville_factor(r, lam, d):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= 1):
        raise DomainError("liouville_factor is defined on (0, 1)")
    out = r ** ((1 - d) / 2) * ((1 - r) * (1 + r)) ** ((1 - d - 2 * lam) / 4)
    return float(out) if out.ndim == 0 else out


# Liouville form ---------------------------------------------------------------

class ReducedCoefficients:
    """Potential ``q`` and weight ``w`` of the Liouville form for dimension ``d``.

    Arithmetic is generic, so mpmath numbers pass straight through.
    Near 0, ``q ~ -(d-3)(d-1)/(4 r^2)``.
    """

    def __init__(self, d: int):
        self.d = d
        self.a0 = Fraction((d - 3) * (d - 1), 4)   # coefficient of 1/r^2 in -q
        self.b0 = Fraction(3 * d - 9, 2)

    def _check(self, r):
        if np.any(np.asarray(r, dtype=float) <= 0) or np.any(np.asarray(r, dtype=float) >= 1):
            raise DomainError("q and w are singular at r = 0 and r = 1")

    def v(self, r):
        d = self.d
        return -8 * (d - 3) * (d - 4) / (d - 4 + r * r) ** 2

    def q(self, r):
        self._check(r)
        lapse = 1 - r * r
        a0, b0 = float(self.a0), float(self.b0)
        return -((a0 - r * r * b0) / (r * r * lapse * lapse) + self.v(r) / lapse)

    def w(self, r):
        self._check(r)
        lapse = 1 - r * r
        return 1 / (lapse * lapse)

    def series_potential(self, mu, n_terms):
        """Taylor coefficients ``p_m`` of ``r^2 (q + mu w) = sum p_m r^(2m)``."""
        d = self.d
        m = np.arange(n_terms + 1)
        inv_sq = m + 1.0                      # (1-x)^-2
        inv = np.ones(n_terms + 1)            # (1-x)^-1
        x = np.zeros(n_terms + 1)
        x[1] = 1.0
        # V(x) = -8(d-3)/(d-4) sum (m+1) (-x/(d-4))^m
        vser = -8.0 * (d - 3) / (d - 4) * (m + 1.0) * (-1.0 / (d - 4)) ** m

        def mul(*arrs):
            out = arrs[0]
            for a in arrs[1:]:
                out = np.convolve(out, a)[: n_terms + 1]
            return out

        return (-float(self.a0) * inv_sq + float(self.b0) * mul(x, inv_sq)
                - mul(x, vser, inv) + mu * mul(x, inv_sq))


def reduced_coefficients(d: int) -> ReducedCoefficients:
    return ReducedCoefficients(d)


def g0_profile(r, d):
    """Zero mode ``r^((d-1)/2) (1-r^2)^((7-d)/4) / (d-4+r^2)`` of the Liouville operator."""
    if isinstance(r, (float, int, np.ndarray)):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            out = r ** ((d - 1) / 2) * ((1 - r) * (1 + r)) ** ((7 - d) / 4) / (d - 4 + r * r)
        return float(out) if out.ndim == 0 else out
    # mpmath and other scalar types
    return r ** (Fraction(d - 1, 2)) * (1 - r * r) ** (Fraction(7 - d, 4)) / (d - 4 + r * r)


def reduced_residual(func, d: int, r_values, dps: int = 30) -> np.ndarray:
    """``|g'' + q g|`` at ``r_values`` with ``g''`` by high-precision numerical differentiation."""
    import mpmath

    coeffs = ReducedCoefficients(d)
    out = []
    with mpmath.workdps(dps):
        for r in r_values:
            x = mpmath.mpf(r)
            lapse = 1 - x * x
            qv = -((mpmath.mpf(coeffs.a0.numerator) / coeffs.a0.denominator
                    - x * x * mpmath.mpf(coeffs.b0.numerator) / coeffs.b0.denominator)
                   / (x * x * lapse * lapse) + coeffs.v(x) / lapse)
            g2 = mpmath.diff(lambda z: func(z, d), x, 2)
            out.append(float(abs(g2 + qv * func(x, d))))
    return np.array(out)


# shooting -----------------------------------------------------------------------

def frobenius_start(problem: ReducedProblem, r_start: float, n_terms: int = 3):
    """``(g, g', relative size of next term)`` of the regular solution at ``r_start``.

    Normalized so that ``g^((d-1)/2)(0) = 1``.
    """
    d = problem.d
    rho = (d - 1) / 2
    p = ReducedCoefficients(d).series_potential(problem.mu, n_terms)
    c = np.zeros(n_terms + 1)
    c[0] = 1.0 / math.factorial((d - 1) // 2)
    for n in range(1, n_terms + 1):
        e = rho + 2 * n
        c[n] = -np.dot(p[1: n + 1], c[n - 1:: -1][:n]) / (e * (e - 1) + p[0])
    powers = rho + 2 * np.arange(n_terms + 1)
    terms = c * r_start ** powers
    g = terms[:n_terms].sum()
    dg = (c[:n_terms] * powers[:n_terms] * r_start ** (powers[:n_terms] - 1)).sum()
    return g, dg, abs(terms[n_terms] / g)


def shoot_reduced(problem: ReducedProblem, grid_density: int = 2000,
                  endpoint_margin: float = 1e-6, r_start: float = 1e-3,
                  rtol: float = 1e-11, n_terms: int = 3) -> ShootResult:
    """Integrate ``g'' = -(q + mu w) g`` from the Frobenius start to ``1 - endpoint_margin``.

    RK45 (Dormand-Prince 5(4)) with relative tolerance ``rtol``.  Samples are
    the accepted steps merged with ``grid_density`` uniformly spaced points of
    the dense output; ``zero_count`` is the number of strict sign changes of
    ``g`` over the samples.
    """
    if not 1e-8 <= endpoint_margin <= 1e-3:
        raise ValueError("endpoint_margin must lie in [1e-8, 1e-3]")
    d, mu = problem.d, float(problem.mu)
    a0 = float(ReducedCoefficients(d).a0)
    b0 = float(ReducedCoefficients(d).b0)
    v_scale = -8.0 * (d - 3) * (d - 4)

    def f(r, y):
        rr = r * r
        lapse = (1.0 - r) * (1.0 + r)
        v = v_scale / (d - 4 + rr) ** 2
        qw = -((a0 - rr * b0) / (rr * lapse * lapse) + v / lapse) + mu / (lapse * lapse)
        return [y[1], -qw * y[0]]

    g, dg, next_term = frobenius_start(problem, r_start, n_terms)
    r_end = 1.0 - endpoint_margin
    sol = solve_ivp(f, (r_start, r_end), [g, dg], method="RK45", rtol=rtol,
                    atol=1e-300, dense_output=True)
    if sol.status != 0:
        raise IntegrationError(f"shooting failed at mu={mu}: {sol.message}")
    rs = np.union1d(sol.t, np.linspace(r_start, sol.t[-1], grid_density))
    gs = sol.sol(rs)[0]
    gs[np.searchsorted(rs, sol.t)] = sol.y[0]
    signs = np.sign(gs)
    zeros = int(np.count_nonzero(signs[:-1] * signs[1:] < 0))
    return ShootResult(zeros, rs, gs, float(sol.t[-1]), float(next_term), sol.sol)


def oscillation_certificate(d: int, mu_min: float = -50.0, n_samples: int = 200,
                            endpoint_margin: float = 1e-6, rtol: float = 1e-8) -> Certificate:
    """Shoot at ``n_samples`` values in ``[mu_min, 0)``; PASS iff no solution has a zero."""
    if not mu_min < 0:
        raise ValueError("mu_min must be negative")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    mus = np.linspace(mu_min, 0.0, n_samples, endpoint=False)
    counts = []
    for mu in mus:
        try:
            res = shoot_reduced(ReducedProblem(float(mu), d), endpoint_margin=endpoint_margin,
                                rtol=rtol)
        except IntegrationError:
            return Certificate(d, list(mus[: len(counts) + 1]), counts, "INCONCLUSIVE", float(mu))
        counts.append(res.zero_count)
    verdict = "PASS" if all(c == 0 for c in counts) else "FAIL"
    return Certificate(d, [float(m) for m in mus], counts, verdict)


# discretized generator ------------------------------------------------------------

def discretize_generator(grid: RadialGrid, params: model.ModelParams,
                         include_potential: bool = True) -> np.ndarray:
    """Linearized generator on the stacked ``(q1, q2)`` nodal vector.

    Assembled here directly from ``D1``, ``D2`` so that it cross-checks the
    evolution right-hand side.
    """
    d = params.d
    r = grid.nodes
    n = grid.size
    lam = r[:, None] * grid.D1
    lap = grid.D2.copy()
    interior = r > 0
    lap[interior] += ((d - 1) / r[interior])[:, None] * grid.D1[interior]
    lap[~interior] = d * grid.D2[~interior]
    if include_potential:
        lap -= np.diag(model.potential_v(r, d))
    eye = np.eye(n)
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = -lam - (d - 2) * eye
    out[:n, n:] = eye
    out[n:, :n] = lap
    out[n:, n:] = -lam - (d - 1) * eye
    return out


def generator_spectrum(params: model.ModelParams, n_low: int = 48, n_high: int = 96,
                       agree_tol: float = 1e-6, include_potential: bool = True,
                       eps: float = GROWTH_EPS) -> SpectrumReport:
    """Eigenvalues at two resolutions; those matched within ``agree_tol`` count as resolved.

    The dense nonsymmetric eigensolve is done on the coefficient-basis form
    of the generator (a similarity transform of the nodal matrix).  In the
    nodal basis the free generator is so non-normal that even its leading
    eigenvalues -(d-2), -(d-1) come out wrong by O(1) at N = 96.
    """
    if n_high < 2 * n_low:
        raise ValueError("need n_high >= 2 n_low")
    d = params.d
    try:
        low = scipy.linalg.eigvals(coefficient_generator(build_grid(n_low, d), params, include_potential))
        high = scipy.linalg.eigvals(coefficient_generator(build_grid(n_high, d), params, include_potential))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise IntegrationError(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((high.imag, -high.real))
    high = high[order]
    mask = np.array([np.min(np.abs(low - z)) <= agree_tol for z in high])
    resolved = high[mask]
    abscissa = float(resolved.real.max()) if resolved.size else None
    return SpectrumReport(d, params.k, high, mask, abscissa, free_growth_bound(d, params.k, eps))


def reduced_matrix_spectrum(d: int, n_points: int = 400, margin: float = 1e-3) -> np.ndarray:
    """Eigenvalues of ``tau`` truncated to ``[margin, 1 - margin]`` with Dirichlet ends.

    Second-order differences on a uniform grid give the generalized problem
    ``(-D2 - q) g = mu w g``; it is solved with a nonsymmetric solver so the
    realness of the result is a genuine check.
    """
    r = np.linspace(margin, 1 - margin, n_points + 2)[1:-1]
    h = r[1] - r[0]
    coeffs = ReducedCoefficients(d)
    main = 2.0 / h ** 2 - coeffs.q(r)
    off = -np.ones(n_points - 1) / h ** 2
    a = np.diag(main) + np.diag(off, 1) + np.diag(off, -1)
    b = np.diag(coeffs.w(r))
    ev = scipy.linalg.eigvals(a, b)
    return ev[np.argsort(ev.real)]


# serialization ------------------------------------------------------------------------

def report_to_json(d: int, k: int, certificate: Certificate | None = None,
                   spectrum: SpectrumReport | None = None) -> dict:
    out = {"d": d, "k": k}
    if certificate is not None:
        out["mu_samples"] = [{"mu": m, "zero_count": c}
                             for m, c in zip(certificate.mu_samples, certificate.zero_counts)]
        out["verdict"] = certificate.verdict
    if spectrum is not None:
        out["eigenvalues"] = [{"re": float(z.real), "im": float(z.imag), "resolved": bool(m)}
                              for z, m in zip(spectrum.eigenvalues, spectrum.resolved_mask)]
        out["abscissa"] = spectrum.abscissa
        out["free_growth_bound"] = spectrum.free_growth_bound
    return out

"""Nonlinear flow of perturbations of the static FHSC profile.

The evolved pair is ``q = W (w1, w2) = e^{-(d-2)s} (f1, f2)`` with
``W = (1 - r^2)^((3-d)/2)``.  In these variables

    dq1/ds = q2 - r q1' - (d-2) q1
    dq2/ds = Delta q1 - r q2' - (d-1) q2 - V q1 - W N(W^{-1} q1)

and every coefficient is smooth on the closed ball, so no boundary condition
is needed at ``r = 1`` (both characteristic speeds point outward there).
The perturbation itself is ``phi = W^{-1} q1``.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import model
from .errors import ConfigError, DomainError
from .geometry import fhsc_to_cartesian, HyperboloidalPoint
from .grid import RadialGrid, build_grid, sobolev_norm

log = logging.getLogger(__name__)

TIMESERIES_HEADER = ("s", "norm_q1", "norm_q2", "center_amp", "local_energy", "verdict")
DECAY = "decay"
GROWTH = "growth-or-blowup"


@dataclass
class EvolutionState:
    s: float
    q1: np.ndarray
    q2: np.ndarray

    def scaled(self, a: float) -> "EvolutionState":
        return EvolutionState(self.s, a * self.q1, a * self.q2)


@dataclass
class EvolutionConfig:
    params: model.ModelParams = field(default_factory=model.ModelParams)
    N: int = 48
    ds: float | None = None
    s_max: float = 20.0
    record_every: int | None = None
    include_potential: bool = True
    include_nonlinearity: bool = True
    blowup_threshold: float = 1e6
    energy_s0: float = math.inf

    def __post_init__(self):
        if self.ds is None:
            self.ds = 0.5 / self.N ** 2
        if not self.ds > 0:
            raise ConfigError("ds must be positive")
        if not self.s_max > 0:
            raise ConfigError("s_max must be positive")
        if self.record_every is None:
            # roughly every 0.05 in s
            self.record_every = max(1, int(round(0.05 / self.ds)))
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1")


@dataclass
class TimeSeries:
    s: list = field(default_factory=list)
    norm_q1: list = field(default_factory=list)
    norm_q2: list = field(default_factory=list)
    center_amp: list = field(default_factory=list)
    local_energy: list = field(default_factory=list)
    row_verdict: list = field(default_factory=list)
    states: list | None = None
    blowup: bool = False

    def append(self, s, n1, n2, center, energy, verdict="ok"):
        self.s.append(s)
        self.norm_q1.append(n1)
        self.norm_q2.append(n2)
        self.center_amp.append(center)
        self.local_energy.append(energy)
        self.row_verdict.append(verdict)

    def column(self, name: str) -> np.ndarray:
        if name == "norm":
            return np.hypot(self.column("norm_q1"), self.column("norm_q2"))
        return np.asarray(getattr(self, name), dtype=float)

    @property
    def final_state(self) -> EvolutionState | None:
        return self.states[-1] if self.states else None

    @property
    def verdict(self) -> str:
        if self.blowup:
            return GROWTH
        norm = self.column("norm")
        return DECAY if norm[-1] <= norm[0] else GROWTH

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TIMESERIES_HEADER)
        for row in zip(self.s, self.norm_q1, self.norm_q2, self.center_amp,
                       self.local_energy, self.row_verdict):
            writer.writerow([_fmt(v) for v in row[:-1]] + [row[-1]])

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def _fmt(v: float) -> str:
    return repr(float(v))


# right-hand side ------------------------------------------------------------

def rhs(grid: RadialGrid, params: model.ModelParams, state: EvolutionState,
        include_potential: bool = True, include_nonlinearity: bool = True):
    """Time derivative ``(dq1, dq2)`` evaluated nodewise with the grid operators."""
    d = params.d
    r = grid.nodes
    q1, q2 = state.q1, state.q2
    dq1 = q2 - grid.lambda_matrix @ q1 - (d - 2) * q1
    dq2 = grid.laplacian_matrix @ q1 - grid.lambda_matrix @ q2 - (d - 1) * q2
    if include_potential:
        dq2 = dq2 - model.potential_v(r, d) * q1
    if include_nonlinearity:
        dq2 = dq2 - model.weighted_remainder(r, q1, d)
    return dq1, dq2


def generator_matrix(grid: RadialGrid, params: model.ModelParams,
                     include_potential: bool = True) -> np.ndarray:
    """Block matrix of the linear part acting on the stacked vector ``(q1, q2)``."""
    d = params.d
    eye = np.eye(grid.size)
    lower_left = grid.laplacian_matrix.copy()
    if include_potential:
        lower_left -= np.diag(model.potential_v(grid.nodes, d))
    return np.block([
        [-grid.lambda_matrix - (d - 2) * eye, eye],
        [lower_left, -grid.lambda_matrix - (d - 1) * eye],
    ])


def coefficient_generator(grid: RadialGrid, params: model.ModelParams,
                          include_potential: bool = True) -> np.ndarray:
    """The generator in the even-Chebyshev coefficient basis ``T_0, T_2, ..., T_2N``.

    A similarity transform of :func:`generator_matrix`.  ``Lambda`` keeps the
    degree of a polynomial in ``r^2`` and the Laplacian lowers it, so the free
    blocks are exactly (strictly) upper triangular; those structural zeros are
    imposed so that roundoff from the ``O(N^4)`` collocation entries does not
    leak into them.  Only the potential block is dense.
    """
    n = grid.size
    d = params.d
    to_coeff = lambda x: grid.cheb_inverse @ x @ grid.cheb_values
    eye = np.eye(n)
    minus_lam = np.triu(to_coeff(-grid.lambda_matrix))
    lap = np.triu(to_coeff(grid.laplacian_matrix), 1)
    if include_potential:
        lap = lap - to_coeff(np.diag(model.potential_v(grid.nodes, d)))
    return np.block([[minus_lam - (d - 2) * eye, eye], [lap, minus_lam - (d - 1) * eye]])


def rk4_step(grid, params, state: EvolutionState, ds: float,
             include_potential: bool = True, include_nonlinearity: bool = True) -> EvolutionState:
    if not ds > 0:
        raise ConfigError("ds must be positive")

    def f(q1, q2):
        return rhs(grid, params, EvolutionState(state.s, q1, q2),
                   include_potential, include_nonlinearity)

    q1, q2 = state.q1, state.q2
    k1 = f(q1, q2)
    k2 = f(q1 + 0.5 * ds * k1[0], q2 + 0.5 * ds * k1[1])
    k3 = f(q1 + 0.5 * ds * k2[0], q2 + 0.5 * ds * k2[1])
    k4 = f(q1 + ds * k3[0], q2 + ds * k3[1])
    return EvolutionState(
        state.s + ds,
        q1 + ds / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        q2 + ds / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
    )


# observables ----------------------------------------------------------------

def center_amplitude(params: model.ModelParams, state: EvolutionState) -> float:
    """``t u(t, 0)`` on the leaf: ``w*(0) + q1(s, 0)`` (the weight is 1 at the centre).

    NaN below ``d = 5``, where there is no explicit profile.
    """
    if params.d < 5:
        return math.nan
    return float(model.w_star_fhsc(0.0, params.d) + state.q1[-1])


def physical_field(params: model.ModelParams, grid: RadialGrid, state: EvolutionState):
    """Cartesian ``(t, |x|, u)`` at the grid nodes of the leaf ``s``.

    The ``r = 1`` node sits at null infinity; it is reported as ``t = x = inf``
    with ``u = 0``.
    """
    d = params.d
    y = grid.nodes
    lapse = (1.0 - y) * (1.0 + y)
    phi = lapse ** ((d - 3) // 2) * state.q1
    u = lapse * math.exp(-state.s) * (model.w_star_fhsc(y, d) + phi)
    t = np.full_like(y, np.inf)
    x = np.full_like(y, np.inf)
    inside = y < 1
    pt = fhsc_to_cartesian(HyperboloidalPoint(np.full(inside.sum(), state.s), y[inside]))
    t[inside], x[inside] = pt.t, pt.x_norm
    return t, x, u


def _quintic_cutoff(r, radius, width):
    z = np.clip((r - radius) / width, 0.0, 1.0)
    return 1.0 - z ** 3 * (10.0 - 15.0 * z + 6.0 * z * z)


def local_energy(grid: RadialGrid, params: model.ModelParams, state: EvolutionState,
                 s0: float = math.inf) -> float:
    """Energy of ``f = e^{(d-2)s} q`` on the ball of radius ``R(s) = 1 - e^{s - s0}``.

    The ball edge is smoothed by a quintic step over two grid cells outside
    ``R(s)``; with ``s0 = inf`` the whole unit ball is used.
    """
    if not state.s < s0:
        raise DomainError("local energy needs s < s0")
    radius = 1.0 - math.exp(state.s - s0)
    r = grid.nodes
    gaps = -np.diff(r)
    idx = min(np.searchsorted(-r, -radius), len(gaps) - 1)
    chi = _quintic_cutoff(r, radius, 2.0 * gaps[idx])
    scale = math.exp((params.d - 2) * state.s)
    f1 = scale * state.q1
    f2 = scale * state.q2
    df1 = grid.D1 @ f1
    return float(grid.quad_weights @ (chi * (df1 * df1 + f1 * f1 + f2 * f2)))


def norms(grid: RadialGrid, params: model.ModelParams, state: EvolutionState):
    """``(||q1||_k, ||q2||_{k-1})``, Sobolev orders capped at the monitoring limit."""
    k = min(params.k, 4)
    return sobolev_norm(grid, state.q1, k), sobolev_norm(grid, state.q2, k - 1)


def state_norm(grid, params, state) -> float:
    return float(np.hypot(*norms(grid, params, state)))


# initial data ---------------------------------------------------------------

def polynomial_data(grid: RadialGrid, a: float, b: float = 0.0, p: int = 2) -> EvolutionState:
    """``q1 = a (1-r^2)^p``, ``q2 = b (1-r^2)^p`` at ``s = 0``."""
    bump = ((1.0 - grid.nodes) * (1.0 + grid.nodes)) ** p
    return EvolutionState(0.0, a * bump, b * bump)


def data_from_time_derivative(grid: RadialGrid, params: model.ModelParams,
                              q1, dq1_ds, s: float = 0.0) -> EvolutionState:
    """Build the pair from ``q1`` and ``d q1/ds`` via ``q2 = (d_s + r d_r + d - 2) q1``."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(dq1_ds, dtype=float) + grid.lambda_matrix @ q1 + (params.d - 2) * q1
    return EvolutionState(s, q1, q2)


# driver -----------------------------------------------------------------------

def evolve(config: EvolutionConfig, initial: EvolutionState, grid: RadialGrid | None = None,
           keep_states: bool = False) -> TimeSeries:
    """Integrate with fixed-step RK4 to ``s_max``, recording every ``record_every`` steps.

    The stepped variables are the even-Chebyshev coefficients of the nodal
    state (an exact change of basis of the collocation system, see
    :func:`coefficient_generator`); observables are taken from nodal values.
    In the nodal basis each step injects roundoff of size ``eps N^4 |q| ds``
    into all modes, which the derivative terms of the monitoring norm then
    amplify; in coefficient form the injected error follows the spectral
    decay of the solution.

    A norm above ``blowup_threshold`` or a non-finite state ends the run with
    a blowup row; this is a result, not an exception.
    """
    params = config.params
    d = params.d
    if grid is None:
        grid = build_grid(config.N, d)
    if grid.d != d or grid.n_modes != config.N:
        raise ConfigError("grid does not match configuration")
    if initial.q1.shape != (grid.size,) or initial.q2.shape != (grid.size,):
        raise ConfigError("initial state is not on the configured grid")

    n = grid.size
    values, coeffs = grid.cheb_values, grid.cheb_inverse
    a = coefficient_generator(grid, params, config.include_potential)
    remainder = model.remainder_kernel(grid.nodes, d) if config.include_nonlinearity else None

    def f(c):
        out = a @ c
        if remainder is not None:
            out[n:] -= coeffs @ remainder(values @ c[:n])
        return out

    ds = config.ds
    n_steps = int(math.ceil(config.s_max / ds - 1e-9))
    series = TimeSeries(states=[] if keep_states else None)

    def record(s, c, verdict="ok"):
        st = EvolutionState(s, values @ c[:n], values @ c[n:])
        n1, n2 = norms(grid, params, st)
        energy = local_energy(grid, params, st, config.energy_s0) if s < config.energy_s0 else math.nan
        series.append(s, n1, n2, center_amplitude(params, st), energy, verdict)
        if keep_states:
            series.states.append(st)
        return n1, n2

    c = np.concatenate([coeffs @ initial.q1, coeffs @ initial.q2]).astype(float)
    s0 = initial.s
    n1, n2 = record(s0, c)
    # |T_2j| <= 1, so the l1 norm of the coefficients bounds every nodal value
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            k1 = f(c)
            k2 = f(c + 0.5 * ds * k1)
            k3 = f(c + 0.5 * ds * k2)
            k4 = f(c + ds * k3)
            c = c + ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            s = s0 + step * ds
            bound = np.abs(c).sum()
            if not math.isfinite(bound) or bound > config.blowup_threshold:
                series.blowup = True
                series.append(s, math.inf, math.inf, math.nan, math.nan, "blowup")
                log.info("blowup verdict at s=%.4f", s)
                break
            if step % config.record_every == 0 or step == n_steps:
                n1, n2 = record(s, c)
                if not (n1 < config.blowup_threshold and n2 < config.blowup_threshold):
                    series.blowup = True
                    series.row_verdict[-1] = "blowup"
                    break
    return series


def fit_decay_rate(series: TimeSeries, window=(0.0, math.inf), column: str = "norm") -> float:
    """Least-squares slope of ``log(column)`` against ``s`` inside ``window``."""
    s = series.column("s")
    y = series.column(column)
    lo, hi = window
    mask = (s >= lo) & (s <= hi)
    if mask.sum() < 10:
        raise ValueError(f"need at least 10 samples in window {window}, got {mask.sum()}")
    y = y[mask]
    if np.any(~(y > 0)):
        raise ValueError("decay fit needs positive values")
    slope, _ = np.polyfit(s[mask], np.log(y), 1)
    return float(slope)


def write_snapshot(fh, grid: RadialGrid, params: model.ModelParams, state: EvolutionState,
                   ds: float) -> None:
    meta = {"d": params.d, "k": params.k, "N": grid.n_modes, "s": state.s, "ds": ds}
    for key, val in meta.items():
        fh.write(f"# {key}={val!r}\n" if isinstance(val, float) else f"# {key}={val}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("r", "q1", "q2"))
    for row in zip(grid.nodes, state.q1, state.q2):
        writer.writerow([_fmt(x) for x in row])


def read_snapshot(fh):
    """Parse a snapshot file into ``(metadata dict, r, q1, q2)``."""
    meta = {}
    rows = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif line.startswith("r,"):
            continue
        else:
            rows.append([float(x) for x in line.split(",")])
    arr = np.array(rows)
    return meta, arr[:, 0], arr[:, 1], arr[:, 2]

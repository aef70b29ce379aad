"""Explicit solution, potential and nonlinearity of the co-rotational model.

The profile equation is the radial ``d``-dimensional semilinear wave equation

    (dt^2 - Delta) u + (d-3) (sin(2 r u) - 2 r u) / (2 r^3) = 0,   d = n + 2,

solved by ``u*(t, r) = (2/r) arctan(r / (sqrt(d-4) t))``.  In FHSC the rescaled
profile ``w = t u`` of this solution is static, ``w*(y) = u*(1, y)``.

Every removable singularity at ``r = 0`` is handled by rewriting in terms of
the entire functions ``(sin h - h)/h^3``, ``(cos h - 1)/h^2`` and ``sin A / A``,
which are evaluated by Taylor series for small arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

SERIES_CUTOFF = 0.1


@dataclass(frozen=True)
class ModelParams:
    d: int = 5
    k: int | None = None

    def __post_init__(self):
        _check_dim(self.d, minimum=5)
        if self.k is None:
            object.__setattr__(self, "k", (self.d + 1) // 2)
        if not 2 * self.k > self.d:
            raise ConfigError(f"k must exceed d/2 (d={self.d}, k={self.k})")

    @classmethod
    def relaxed(cls, d: int, k: int | None = None) -> "ModelParams":
        """Parameters for free-flow-only use, permitting ``d = 3``."""
        _check_dim(d, minimum=3)
        obj = object.__new__(cls)
        object.__setattr__(obj, "d", d)
        object.__setattr__(obj, "k", (d + 1) // 2 if k is None else k)
        if not 2 * obj.k > d:
            raise ConfigError(f"k must exceed d/2 (d={d}, k={obj.k})")
        return obj

    @property
    def n(self) -> int:
        return self.d - 2


def _check_dim(d, minimum):
    if int(d) != d or d % 2 == 0:
        raise ConfigError(f"d must be odd (got {d})")
    if d < minimum:
        raise ConfigError(f"d must be >= {minimum} (got {d})")


# entire helper functions ---------------------------------------------------

def _sin_minus_id_over_cube(h):
    """(sin h - h) / h^3."""
    h = np.asarray(h, dtype=float)
    h2 = h * h
    small = np.abs(h) < SERIES_CUTOFF
    # 7 terms: truncation below 0.1^14 / 17! relative
    ser = -1 / 6 + h2 * (1 / 120 + h2 * (-1 / 5040 + h2 * (1 / 362880 + h2 * (
        -1 / 39916800 + h2 * (1 / 6227020800 - h2 / 1307674368000)))))
    if small.all():
        return ser
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (np.sin(h) - h) / (h2 * h)
    return np.where(small, ser, direct)


def _cos_minus_one_over_square(h):
    """(cos h - 1) / h^2."""
    h = np.asarray(h, dtype=float)
    h2 = h * h
    small = np.abs(h) < SERIES_CUTOFF
    ser = -1 / 2 + h2 * (1 / 24 + h2 * (-1 / 720 + h2 * (1 / 40320 + h2 * (
        -1 / 3628800 + h2 * (1 / 479001600 - h2 / 87178291200)))))
    if small.all():
        return ser
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (np.cos(h) - 1.0) / h2
    return np.where(small, ser, direct)


def _sinc(a):
    """sin(a)/a (unnormalized)."""
    return np.sinc(np.asarray(a, dtype=float) / np.pi)


def _atan_over_id(z):
    """arctan(z)/z."""
    z = np.asarray(z, dtype=float)
    z2 = z * z
    small = np.abs(z) < SERIES_CUTOFF
    ser = 1 + z2 * (-1 / 3 + z2 * (1 / 5 + z2 * (-1 / 7 + z2 * (1 / 9 + z2 * (
        -1 / 11 + z2 * (1 / 13 - z2 / 15))))))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.arctan(z) / z
    return np.where(small, ser, direct)


def _out(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


# explicit solution and potential ------------------------------------------

def u_star(t, r, d):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("u_star needs t > 0")
    a = math.sqrt(d - 4)
    return _out(2.0 / (a * t) * _atan_over_id(np.asarray(r, dtype=float) / (a * t)))


def w_star_fhsc(y, d):
    """Static FHSC profile ``(2/|y|) arctan(|y|/sqrt(d-4))``, equal to ``u_star(1, y)``."""
    a = math.sqrt(d - 4)
    return _out(2.0 / a * _atan_over_id(np.asarray(y, dtype=float) / a))


def potential_v(y, d):
    y = np.asarray(y, dtype=float)
    return _out(-8.0 * (d - 3) * (d - 4) / (d - 4 + y * y) ** 2)


# nonlinearity ---------------------------------------------------------------

def f_tilde(r, z, d):
    """``(d-3)/2 (sin(2 r z) - 2 r z) / r^3``."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    return _out(4.0 * (d - 3) * z ** 3 * _sin_minus_id_over_cube(2.0 * r * z))


def f_tilde_prime(r, z, d):
    """``d/dz f_tilde = (d-3)(cos(2 r z) - 1) / r^2``."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    return _out(4.0 * (d - 3) * z * z * _cos_minus_one_over_square(2.0 * r * z))


def f_tilde_second(r, z, d):
    """``d^2/dz^2 f_tilde = -2(d-3) sin(2 r z) / r``; equals ``-4(d-3) z`` at r = 0."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    return _out(-4.0 * (d - 3) * z * _sinc(2.0 * r * z))


def _remainder_over_phi_squared(r, phi, d):
    # N / phi^2 = 4(d-3) [w sinc(A) C(h) + phi cos(A) S(h)],  A = 2 r w*, h = 2 r phi
    w = np.asarray(w_star_fhsc(r, d))
    a = 2.0 * r * w
    h = 2.0 * r * phi
    return 4.0 * (d - 3) * (w * _sinc(a) * _cos_minus_one_over_square(h)
                            + phi * np.cos(a) * _sin_minus_id_over_cube(h))


def nonlinear_remainder(r, phi, d):
    """Quadratic remainder ``F(w*+phi) - F(w*) - F'(w*) phi`` of the FHSC nonlinearity.

    Uses ``sin(A+h) - sin A - h cos A = cos A (sin h - h) + sin A (cos h - 1)``,
    so no difference of nearly equal quantities is formed.
    """
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return _out(phi * phi * _remainder_over_phi_squared(r, phi, d))


def weighted_remainder(r, q1, d):
    """``W N(W^{-1} q1)`` with ``W = (1-r^2)^((3-d)/2)``; bounded on the closed ball.

    Written as ``q1 * phi * J(r, phi)`` with ``phi = (1-r^2)^((d-3)/2) q1`` and
    ``J = N/phi^2`` smooth, so the infinite weight at ``r = 1`` never appears.
    At ``r = 1`` the value is exactly 0.
    """
    return _out(remainder_kernel(r, d)(q1))


def remainder_kernel(r, d):
    """Return ``q1 -> weighted_remainder(r, q1, d)`` with the static factors precomputed."""
    r = np.asarray(r, dtype=float)
    w = np.asarray(w_star_fhsc(r, d))
    a = 2.0 * r * w
    c_lin = 4.0 * (d - 3) * w * _sinc(a)
    c_cub = 4.0 * (d - 3) * np.cos(a)
    lapse_pow = ((1.0 - r) * (1.0 + r)) ** ((d - 3) // 2)
    two_r = 2.0 * r

    def apply(q1):
        q1 = np.asarray(q1, dtype=float)
        phi = lapse_pow * q1
        h = two_r * phi
        return q1 * phi * (c_lin * _cos_minus_one_over_square(h)
                           + c_cub * phi * _sin_minus_id_over_cube(h))

    return apply


# co-rotational sphere embedding -------------------------------------------

def corotational_embed(u_profile_value, t, x_norm, direction):
    """Map ``(sin(|x| u) x/|x|, cos(|x| u))`` into ``S^n`` for a unit ``direction`` in R^n.

    ``t`` only labels the spacetime point; the embedding is pointwise in the
    profile value.
    """
    e = np.asarray(direction, dtype=float)
    angle = float(x_norm) * float(u_profile_value)
    return np.concatenate([math.sin(angle) * e, [math.cos(angle)]])


# Cartesian residual of the profile equation --------------------------------

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def cartesian_residual(u_sampler, t, r, d, h=1e-3):
    """Residual of the radial profile equation by 4th-order central differences.

    ``u_sampler(t, r)`` must be a radial profile; it is sampled at ``|r|`` so the
    stencil reflects evenly through the origin.  At ``r = 0`` the radial
    Laplacian is ``d * u_rr``.
    """
    if t - 2 * h <= 0 or r < 0:
        raise DomainError("stencil must stay in t > 0, r >= 0")
    off = np.arange(-2, 3) * h
    ut = np.array([u_sampler(t + o, r) for o in off], dtype=float)
    ur = np.array([u_sampler(t, abs(r + o)) for o in off], dtype=float)
    u_tt = _D2 @ ut / h ** 2
    u_rr = _D2 @ ur / h ** 2
    if r == 0:
        lap = d * u_rr
    else:
        lap = u_rr + (d - 1) / r * (_D1 @ ur / h)
    u0 = ur[2]
    return float(u_tt - lap + f_tilde(r, u0, d))

"""Forward hyperboloidal similarity coordinates (FHSC) and conformal weights.

Everything here is radial: points carry ``|x|`` and ``|y|`` only.  All maps
accept scalars or numpy arrays and broadcast.

The FHSC map factors as ``kelvin(similarity_chi(s, y))``: classical
backward similarity coordinates on the truncated past cone of the origin
followed by the Kelvin inversion ``(t, x) -> (-t, x) / (t^2 - |x|^2)``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError


class CartesianPoint(NamedTuple):
    t: float | np.ndarray
    x_norm: float | np.ndarray


class HyperboloidalPoint(NamedTuple):
    s: float | np.ndarray
    y_norm: float | np.ndarray


class WeightSpec(NamedTuple):
    """Weight ``W_ell(y) = (1 - |y|^2)^((ell - d)/2)``; ``W = W_3``."""

    ell: int
    d: int

    @property
    def exponent(self) -> int:
        return (self.ell - self.d) // 2


def make_weight(ell: int, d: int) -> WeightSpec:
    if ell not in (1, 3):
        raise ValueError(f"ell must be 1 or 3, got {ell}")
    if d < 3 or d % 2 == 0:
        raise ValueError(f"d must be odd and >= 3, got {d}")
    return WeightSpec(ell, d)


def fhsc_to_cartesian(p: HyperboloidalPoint) -> CartesianPoint:
    s = np.asarray(p.s, dtype=float)
    y = np.asarray(p.y_norm, dtype=float)
    if np.any(y >= 1) or np.any(y < 0):
        raise DomainError("y_norm must lie in [0, 1)")
    t = np.exp(s) / (1.0 - y * y)
    return CartesianPoint(_out(t), _out(t * y))


def cartesian_to_fhsc(p: CartesianPoint) -> HyperboloidalPoint:
    t = np.asarray(p.t, dtype=float)
    x = np.asarray(p.x_norm, dtype=float)
    if np.any(t <= 0) or np.any(x < 0):
        raise DomainError("need t > 0 and x_norm >= 0")
    y = x / t
    if np.any(y >= 1):
        raise DomainError("point is not inside the forward light cone")
    # t^2 - x^2 = t^2 (1 - y^2); written this way to avoid cancellation
    s = np.log(t * (1.0 - y) * (1.0 + y))
    if np.any(s < -1e-14 * np.maximum(1.0, np.abs(np.log(t)))):
        raise DomainError("point lies below the initial hyperboloid (s < 0)")
    return HyperboloidalPoint(_out(np.maximum(s, 0.0)), _out(y))


def similarity_chi(tau, xi_norm) -> CartesianPoint:
    tau = np.asarray(tau, dtype=float)
    xi = np.asarray(xi_norm, dtype=float)
    if np.any(xi >= 1) or np.any(xi < 0):
        raise DomainError("xi_norm must lie in [0, 1)")
    if np.any(tau < 0):
        raise DomainError("tau must be nonnegative")
    e = np.exp(-tau)
    return CartesianPoint(_out(-e), _out(e * xi))


def kelvin(p: CartesianPoint) -> CartesianPoint:
    t = np.asarray(p.t, dtype=float)
    x = np.asarray(p.x_norm, dtype=float)
    if np.any(t >= 0) or np.any(t < -1) or np.any(x >= np.abs(t)) or np.any(x < 0):
        raise DomainError("kelvin is defined on |x| < |t|, -1 <= t < 0")
    q = (t - x) * (t + x)
    return CartesianPoint(_out(-t / q), _out(x / q))


def weight(spec: WeightSpec, y_norm):
    """``(1 - y^2)^((ell-d)/2)``; ``+inf`` at ``y = 1`` when the exponent is negative."""
    y = np.asarray(y_norm, dtype=float)
    base = (1.0 - y) * (1.0 + y)
    with np.errstate(divide="ignore"):
        return _out(base ** float(spec.exponent))


def weight_reciprocal(spec: WeightSpec, y_norm):
    """``1/W_ell``, the polynomial ``(1 - y^2)^((d-ell)/2)`` (integer power for odd d)."""
    y = np.asarray(y_norm, dtype=float)
    base = (1.0 - y) * (1.0 + y)
    return _out(base ** (-spec.exponent))


def _out(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a

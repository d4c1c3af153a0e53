"""
Curvature-dependent trigonometry.

C_kappa, S_kappa and T_kappa interpolate between the circular functions
(kappa > 0), the linear functions (kappa = 0) and the hyperbolic functions
(kappa < 0):

    C_kappa(u) = cos(sqrt(kappa) u)        S_kappa(u) = sin(sqrt(kappa) u)/sqrt(kappa)
    C_0(u)     = 1                         S_0(u)     = u
    C_kappa(u) = cosh(sqrt(-kappa) u)      S_kappa(u) = sinh(sqrt(-kappa) u)/sqrt(-kappa)

and T_kappa = S_kappa / C_kappa. Near kappa*u**2 = 0 the closed forms are
replaced by their Taylor series so that the kappa -> 0 limit is smooth.

Every function accepts either a Python/numpy scalar or a numpy array for u.
Scalars take a math-module fast path, which keeps the integrators cheap.
"""

import math
import numbers
from enum import Enum
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from core.exceptions import DomainError, PoleError

# |kappa| u^2 below this uses the truncated series
SERIES_CROSSOVER = 1e-8

# |C_kappa| below this is treated as a tangent pole
POLE_FLOOR = 1e-12

ArrayLike = Union[float, np.ndarray]


class CurvatureKind(Enum):
    """Sign class of the curvature."""
    SPHERE = "sphere"
    FLAT = "flat"
    HYPERBOLIC = "hyperbolic"


class Curvature(BaseModel):
    """
    Constant Gaussian curvature of the configuration surface.

    Classification is by the exact sign of kappa; kappa = 0 is the only flat
    value. Tiny non-zero curvatures are handled by the series branch.

    Attributes:
        kappa (float): Curvature in units of 1/length^2
    """
    kappa: float

    model_config = ConfigDict(frozen=True)

    @field_validator('kappa')
    @classmethod
    def validate_kappa(cls, v):
        """Validate that the curvature is a finite real number."""
        if not math.isfinite(v):
            raise ValueError(f"kappa must be finite, got {v}")
        return float(v)

    @property
    def kind(self) -> CurvatureKind:
        return classify(self.kappa)


KappaLike = Union[float, Curvature]


def classify(kappa: KappaLike) -> CurvatureKind:
    """Classify a curvature value by its sign."""
    k = kappa_value(kappa)
    if k > 0.0:
        return CurvatureKind.SPHERE
    if k < 0.0:
        return CurvatureKind.HYPERBOLIC
    return CurvatureKind.FLAT


def kappa_value(kappa: KappaLike) -> float:
    """Return the float curvature of a Curvature or a plain number."""
    if isinstance(kappa, Curvature):
        return kappa.kappa
    return float(kappa)


def _is_scalar(u) -> bool:
    return isinstance(u, numbers.Real) and not isinstance(u, np.ndarray)


def kcos(kappa: KappaLike, u: ArrayLike) -> ArrayLike:
    """
    Evaluate C_kappa(u).

    Args:
        kappa: Curvature
        u: Argument (length)

    Returns:
        C_kappa(u), scalar or array matching u
    """
    k = kappa_value(kappa)
    if _is_scalar(u):
        u = float(u)
        if k == 0.0:
            return 1.0
        z = k * u * u
        if abs(z) < SERIES_CROSSOVER:
            return 1.0 - 0.5 * z * (1.0 - z / 12.0 * (1.0 - z / 30.0))
        if k > 0.0:
            return math.cos(math.sqrt(k) * u)
        return math.cosh(math.sqrt(-k) * u)

    u = np.asarray(u, dtype=float)
    if k == 0.0:
        return np.ones_like(u)
    root = math.sqrt(abs(k))
    z = k * u * u
    closed = np.cos(root * u) if k > 0.0 else np.cosh(root * u)
    small = np.abs(z) < SERIES_CROSSOVER
    if np.any(small):
        series = 1.0 - 0.5 * z * (1.0 - z / 12.0 * (1.0 - z / 30.0))
        closed = np.where(small, series, closed)
    return closed


def ksin(kappa: KappaLike, u: ArrayLike) -> ArrayLike:
    """
    Evaluate S_kappa(u).

    Args:
        kappa: Curvature
        u: Argument (length)

    Returns:
        S_kappa(u), scalar or array matching u
    """
    k = kappa_value(kappa)
    if _is_scalar(u):
        u = float(u)
        if k == 0.0:
            return u
        z = k * u * u
        if abs(z) < SERIES_CROSSOVER:
            return u * (1.0 - z / 6.0 * (1.0 - z / 20.0 * (1.0 - z / 42.0)))
        root = math.sqrt(abs(k))
        if k > 0.0:
            return math.sin(root * u) / root
        return math.sinh(root * u) / root

    u = np.asarray(u, dtype=float)
    if k == 0.0:
        return u.copy()
    root = math.sqrt(abs(k))
    z = k * u * u
    closed = (np.sin(root * u) if k > 0.0 else np.sinh(root * u)) / root
    small = np.abs(z) < SERIES_CROSSOVER
    if np.any(small):
        series = u * (1.0 - z / 6.0 * (1.0 - z / 20.0 * (1.0 - z / 42.0)))
        closed = np.where(small, series, closed)
    return closed


def _check_pole(c: ArrayLike, kappa: float, u: ArrayLike) -> None:
    if _is_scalar(c):
        if abs(c) < POLE_FLOOR:
            raise PoleError(
                f"T_kappa is singular: |C_kappa(u)| = {abs(c):.3e} < {POLE_FLOOR:g} "
                f"at kappa={kappa}, u={u} (tangent pole, C_kappa(u) must not vanish)"
            )
        return
    bad = np.abs(c) < POLE_FLOOR
    if np.any(bad):
        first = np.asarray(u, dtype=float)[bad].flat[0]
        raise PoleError(
            f"T_kappa is singular at {int(bad.sum())} point(s), first at u={first} "
            f"(kappa={kappa}); C_kappa(u) must stay above {POLE_FLOOR:g}"
        )


def ktan(kappa: KappaLike, u: ArrayLike) -> ArrayLike:
    """
    Evaluate T_kappa(u) = S_kappa(u) / C_kappa(u).

    Raises:
        PoleError: If |C_kappa(u)| falls below POLE_FLOOR
    """
    k = kappa_value(kappa)
    c = kcos(k, u)
    _check_pole(c, k, u)
    return ksin(k, u) / c


def ktrig_eval(kappa: KappaLike, u: ArrayLike) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    Evaluate (C_kappa(u), S_kappa(u), T_kappa(u)).

    Args:
        kappa: Curvature
        u: Argument (length)

    Returns:
        Tuple (C, S, T) with T = S / C

    Raises:
        PoleError: If |C_kappa(u)| falls below POLE_FLOOR
    """
    k = kappa_value(kappa)
    c = kcos(k, u)
    _check_pole(c, k, u)
    s = ksin(k, u)
    return c, s, s / c


def ktrig_derivatives(kappa: KappaLike, u: ArrayLike) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    Derivatives of the kappa-trigonometric functions.

    d/du C = -kappa S, d/du S = C, d/du T = 1/C^2.

    Returns:
        Tuple (dC, dS, dT)

    Raises:
        PoleError: If |C_kappa(u)| falls below POLE_FLOOR
    """
    k = kappa_value(kappa)
    c = kcos(k, u)
    _check_pole(c, k, u)
    s = ksin(k, u)
    return -k * s, c, 1.0 / (c * c)


def karcsin(kappa: KappaLike, v: ArrayLike) -> ArrayLike:
    """
    Inverse of S_kappa on its principal branch.

    For kappa > 0 the result lies in [-pi/(2 sqrt(kappa)), pi/(2 sqrt(kappa))].

    Raises:
        DomainError: If kappa > 0 and |sqrt(kappa) v| > 1
    """
    k = kappa_value(kappa)
    scalar = _is_scalar(v)
    v = np.asarray(v, dtype=float)
    if k == 0.0:
        out = v.copy()
    elif k > 0.0:
        root = math.sqrt(k)
        arg = root * v
        if np.any(np.abs(arg) > 1.0 + 1e-15):
            raise DomainError(
                f"S_kappa^-1 undefined: |sqrt(kappa) v| > 1 for kappa={k} "
                f"(S_kappa is bounded by 1/sqrt(kappa) on the sphere)"
            )
        out = np.arcsin(np.clip(arg, -1.0, 1.0)) / root
    else:
        root = math.sqrt(-k)
        out = np.arcsinh(root * v) / root
    return float(out) if scalar else out


def kangle(kappa: KappaLike, s: ArrayLike, c: ArrayLike) -> ArrayLike:
    """
    Recover u from the pair (S_kappa(u), C_kappa(u)).

    For kappa > 0 the branch covers (-pi/sqrt(kappa), pi/sqrt(kappa)]; for
    kappa <= 0 the map u -> S_kappa(u) is already one-to-one.
    """
    k = kappa_value(kappa)
    scalar = _is_scalar(s) and _is_scalar(c)
    s = np.asarray(s, dtype=float)
    c = np.asarray(c, dtype=float)
    if k == 0.0:
        out = s.copy()
    elif k > 0.0:
        root = math.sqrt(k)
        out = np.arctan2(root * s, c) / root
        half_period = math.pi / root
        out = np.where(out <= -half_period, out + 2.0 * half_period, out)
    else:
        root = math.sqrt(-k)
        out = np.arcsinh(root * s) / root
    return float(out) if scalar else out

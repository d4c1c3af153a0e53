"""
Coordinate systems on the constant-curvature surfaces.

The surface is realized in the ambient space (x0, x1, x2) as
x0^2 + kappa (x1^2 + x2^2) = 1 (upper sheet x0 >= 1 when kappa < 0).
Geodesic parallel coordinates (x, y) and geodesic polar coordinates (r, phi)
are tied to it through

    x0 = C(x) C(y) = C(r)
    x1 = S(x) C(y) = S(r) cos(phi)
    x2 = S(y)      = S(r) sin(phi)

and the metric in parallel coordinates is ds^2 = C(y)^2 dx^2 + dy^2.
"""

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from core.exceptions import DomainError, PoleError
from core.ktrig import POLE_FLOOR, KappaLike, kangle, karcsin, kappa_value, kcos, ksin
from core.params import PhasePoint

# ambient constraint tolerance
CONSTRAINT_TOLERANCE = 1e-12

TWO_PI = 2.0 * math.pi


class ParallelCoords(BaseModel):
    """Geodesic parallel coordinates (x, y)."""
    x: float
    y: float

    model_config = ConfigDict(frozen=True)


class PolarCoords(BaseModel):
    """
    Geodesic polar coordinates.

    Attributes:
        r (float): Geodesic distance from the origin, > 0
        phi (float): Angle from the base geodesic, in [0, 2 pi)
    """
    r: float
    phi: float

    model_config = ConfigDict(frozen=True)

    @field_validator('r')
    @classmethod
    def validate_r(cls, v):
        """Validate that the radius is positive."""
        if not v > 0.0:
            raise ValueError(f"r must be > 0, got {v}")
        return v

    @field_validator('phi')
    @classmethod
    def validate_phi(cls, v):
        """Validate that the angle lies in [0, 2 pi)."""
        if not 0.0 <= v < TWO_PI:
            raise ValueError(f"phi must lie in [0, 2*pi), got {v}")
        return v


class AmbientPoint(BaseModel):
    """Point of the ambient (Weierstrass) model."""
    x0: float
    x1: float
    x2: float

    model_config = ConfigDict(frozen=True)

    def constraint_residual(self, kappa: KappaLike) -> float:
        """Return x0^2 + kappa (x1^2 + x2^2) - 1."""
        k = kappa_value(kappa)
        return self.x0 ** 2 + k * (self.x1 ** 2 + self.x2 ** 2) - 1.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2], dtype=float)


def check_parallel_domain(kappa: KappaLike, pc: ParallelCoords) -> None:
    """
    Validate parallel coordinates for the given curvature.

    Raises:
        DomainError: If kappa > 0 and x is outside (-pi/sqrt(kappa), pi/sqrt(kappa)]
            or |y| >= pi/(2 sqrt(kappa))
    """
    k = kappa_value(kappa)
    if k <= 0.0:
        return
    root = math.sqrt(k)
    if not (-math.pi / root < pc.x <= math.pi / root):
        raise DomainError(
            f"x={pc.x} outside (-pi/sqrt(kappa), pi/sqrt(kappa)] for kappa={k}"
        )
    if not abs(pc.y) < math.pi / (2.0 * root):
        raise DomainError(
            f"|y|={abs(pc.y)} not below pi/(2 sqrt(kappa)) = {math.pi / (2.0 * root)} for kappa={k}"
        )


def check_polar_domain(kappa: KappaLike, pol: PolarCoords) -> None:
    """
    Validate polar coordinates for the given curvature.

    Raises:
        DomainError: If kappa > 0 and r >= pi/sqrt(kappa)
    """
    k = kappa_value(kappa)
    if k > 0.0 and not pol.r < math.pi / math.sqrt(k):
        raise DomainError(f"r={pol.r} not below pi/sqrt(kappa) for kappa={k}")


def embed(kappa: KappaLike, x, y) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ambient embedding of parallel coordinates."""
    cy = kcos(kappa, y)
    return kcos(kappa, x) * cy, ksin(kappa, x) * cy, ksin(kappa, y)


def parallel_to_ambient(kappa: KappaLike, pc: ParallelCoords) -> AmbientPoint:
    """
    Map parallel coordinates to the ambient model.

    Args:
        kappa: Curvature
        pc: Parallel coordinates inside the domain

    Returns:
        AmbientPoint (C(x)C(y), S(x)C(y), S(y))

    Raises:
        DomainError: If pc is outside the coordinate domain
    """
    check_parallel_domain(kappa, pc)
    x0, x1, x2 = embed(kappa, pc.x, pc.y)
    return AmbientPoint(x0=x0, x1=x1, x2=x2)


def polar_to_ambient(kappa: KappaLike, pol: PolarCoords) -> AmbientPoint:
    """Map polar coordinates to the ambient model, (C(r), S(r) cos phi, S(r) sin phi)."""
    check_polar_domain(kappa, pol)
    s = ksin(kappa, pol.r)
    return AmbientPoint(x0=kcos(kappa, pol.r), x1=s * math.cos(pol.phi), x2=s * math.sin(pol.phi))


def ambient_to_parallel(kappa: KappaLike, amb: AmbientPoint) -> ParallelCoords:
    """
    Invert the parallel-coordinate embedding.

    y is recovered as S^-1(x2); x from the pair (S(x), C(x)) = (x1, x0)/C(y),
    which selects the correct branch over the whole x-range of the sphere.

    Raises:
        DomainError: If the point sits on the y-wall (C(y) = 0)
    """
    k = kappa_value(kappa)
    y = karcsin(k, amb.x2)
    cy = kcos(k, y)
    if abs(cy) < POLE_FLOOR:
        raise DomainError(f"ambient point {amb} lies on the wall |y| = pi/(2 sqrt(kappa))")
    x = kangle(k, amb.x1 / cy, amb.x0 / cy)
    return ParallelCoords(x=x, y=y)


def polar_to_parallel(kappa: KappaLike, pol: PolarCoords) -> ParallelCoords:
    """
    Convert polar to parallel coordinates.

    Args:
        kappa: Curvature
        pol: Polar coordinates inside the domain

    Returns:
        The unique ParallelCoords in the valid ranges with the same ambient point

    Raises:
        DomainError: If pol is outside the domain
    """
    return ambient_to_parallel(kappa, polar_to_ambient(kappa, pol))


def parallel_to_polar(kappa: KappaLike, pc: ParallelCoords) -> PolarCoords:
    """Convert parallel to polar coordinates (origin excluded)."""
    k = kappa_value(kappa)
    amb = parallel_to_ambient(k, pc)
    rho = math.hypot(amb.x1, amb.x2)
    if rho == 0.0 and amb.x0 > 0.0:
        raise DomainError("polar coordinates are undefined at the origin")
    r = kangle(k, rho, amb.x0)
    phi = math.atan2(amb.x2, amb.x1) % TWO_PI
    if phi >= TWO_PI:
        phi = 0.0
    return PolarCoords(r=r, phi=phi)


def metric_tensor(kappa: KappaLike, pc: ParallelCoords) -> np.ndarray:
    """Return the metric diag(C(y)^2, 1) in parallel coordinates."""
    cy = kcos(kappa, pc.y)
    return np.array([[cy * cy, 0.0], [0.0, 1.0]])


def kinetic_energy(kappa: KappaLike, state: PhasePoint) -> float:
    """
    Free kinetic energy in parallel coordinates, (px^2 / C(y)^2 + py^2) / 2.

    Raises:
        PoleError: If |C(y)| falls below the pole floor
    """
    cy = kcos(kappa, state.y)
    if abs(cy) < POLE_FLOOR:
        raise PoleError(f"kinetic energy singular at the y-wall, y={state.y}")
    return 0.5 * (state.px ** 2 / (cy * cy) + state.py ** 2)


def kinetic_energy_polar(kappa: KappaLike, r: float, pr: float, pphi: float) -> float:
    """Free kinetic energy in polar coordinates, (pr^2 + pphi^2 / S(r)^2) / 2."""
    s = ksin(kappa, r)
    if abs(s) < POLE_FLOOR:
        raise PoleError(f"polar kinetic energy singular at r={r}")
    return 0.5 * (pr ** 2 + pphi ** 2 / (s * s))


def polar_momenta(kappa: KappaLike, state: PhasePoint, step: float = 1e-6) -> Tuple[float, float, float, float]:
    """
    Canonically transform a parallel-coordinate state to polar variables.

    Momenta transform with the Jacobian of the chart change,
    p_(r,phi) = J^T p_(x,y) with J = d(x, y)/d(r, phi), the Jacobian being
    taken by central differences of polar_to_parallel.

    Returns:
        Tuple (r, phi, pr, pphi)
    """
    k = kappa_value(kappa)
    pol = parallel_to_polar(k, ParallelCoords(x=state.x, y=state.y))

    def chart(r: float, phi: float) -> np.ndarray:
        pc = polar_to_parallel(k, PolarCoords(r=r, phi=phi % TWO_PI))
        return np.array([pc.x, pc.y])

    d_dr = (chart(pol.r + step, pol.phi) - chart(pol.r - step, pol.phi)) / (2.0 * step)
    base = chart(pol.r, pol.phi)
    # unwrap x across the antipodal branch cut before differencing in phi
    plus, minus = chart(pol.r, pol.phi + step), chart(pol.r, pol.phi - step)
    if k > 0.0:
        period = 2.0 * math.pi / math.sqrt(k)
        for point in (plus, minus):
            point[0] += period * round((base[0] - point[0]) / period)
    d_dphi = (plus - minus) / (2.0 * step)
    p = np.array([state.px, state.py])
    return pol.r, pol.phi, float(d_dr @ p), float(d_dphi @ p)

"""
Physical parameters and classical phase-space states.

ModelParams is the single source of the physical constants used by the
classical, dynamical and quantum modules. PhasePoint is a classical state in
geodesic parallel coordinates.
"""

import math
from typing import Any, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from core.ktrig import Curvature, CurvatureKind, classify

# tolerance for gamma == m/n
RATIO_TOLERANCE = 1e-12


class ModelParams(BaseModel):
    """
    Parameters of the curved anisotropic oscillator.

    Attributes:
        kappa (float): Curvature (sphere > 0, plane = 0, hyperboloid < 0)
        omega (float): Frequency of the y-oscillator, > 0
        gamma (float): Anisotropy ratio omega_x / omega_y, > 0 (default 1, isotropic)
        hbar (float): Planck constant used by the quantum modules, > 0
        ratio (Optional[Tuple[int, int]]): Coprime (m, n) with m/n = gamma
    """
    kappa: float
    omega: float
    gamma: float = 1.0
    hbar: float = 1.0
    ratio: Optional[Tuple[int, int]] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='before')
    @classmethod
    def fill_gamma_from_ratio(cls, data: Any):
        """Allow gamma to be omitted when a ratio is given."""
        if isinstance(data, dict) and data.get('gamma') is None and data.get('ratio') is not None:
            m, n = data['ratio']
            data = {**data, 'gamma': int(m) / int(n)}
        return data

    @field_validator('kappa')
    @classmethod
    def validate_kappa(cls, v):
        """Validate that kappa is finite."""
        if not math.isfinite(v):
            raise ValueError(f"kappa must be finite, got {v}")
        return v

    @field_validator('omega', 'gamma', 'hbar')
    @classmethod
    def validate_positive(cls, v, info):
        """Validate that frequency, anisotropy and hbar are positive."""
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"{info.field_name} must be a positive finite number, got {v}")
        return v

    @field_validator('ratio')
    @classmethod
    def validate_ratio(cls, v):
        """Validate that the ratio is a pair of coprime positive integers."""
        if v is None:
            return v
        m, n = v
        if m <= 0 or n <= 0:
            raise ValueError(f"ratio entries must be positive integers, got {v}")
        if math.gcd(m, n) != 1:
            raise ValueError(f"ratio {m}:{n} is not in lowest terms")
        return (int(m), int(n))

    @model_validator(mode='after')
    def validate_consistency(self):
        """Check the sphere anisotropy bound and gamma = m/n."""
        if self.kappa > 0.0 and self.gamma < 0.5:
            raise ValueError(
                f"on the sphere gamma must be >= 1/2 so that the xi-chart covers "
                f"the x-range, got gamma={self.gamma}"
            )
        if self.ratio is not None:
            m, n = self.ratio
            if abs(self.gamma - m / n) >= RATIO_TOLERANCE:
                raise ValueError(f"gamma={self.gamma} does not equal ratio {m}/{n}")
        return self

    @classmethod
    def from_ratio(cls, kappa: float, omega: float, m: int, n: int, hbar: float = 1.0) -> "ModelParams":
        """Build commensurate parameters with gamma = m/n."""
        return cls(kappa=kappa, omega=omega, gamma=m / n, hbar=hbar, ratio=(m, n))

    @property
    def curvature(self) -> Curvature:
        return Curvature(kappa=self.kappa)

    @property
    def kind(self) -> CurvatureKind:
        return classify(self.kappa)

    @property
    def is_flat(self) -> bool:
        return self.kappa == 0.0

    def with_kappa(self, kappa: float) -> "ModelParams":
        """Return a copy at another curvature."""
        return ModelParams(kappa=kappa, omega=self.omega, gamma=self.gamma, hbar=self.hbar, ratio=self.ratio)


class PhasePoint(BaseModel):
    """
    Classical state in geodesic parallel coordinates.

    Attributes:
        x (float): Distance along the base geodesic
        y (float): Distance along the orthogonal geodesic
        px (float): Momentum conjugate to x
        py (float): Momentum conjugate to y
    """
    x: float
    y: float
    px: float = 0.0
    py: float = 0.0

    model_config = ConfigDict(frozen=True)

    @field_validator('x', 'y', 'px', 'py')
    @classmethod
    def validate_finite(cls, v, info):
        """Validate that every component is finite."""
        if not math.isfinite(v):
            raise ValueError(f"{info.field_name} must be finite, got {v}")
        return float(v)

    def as_array(self) -> np.ndarray:
        """Return the state as the vector (x, y, px, py)."""
        return np.array([self.x, self.y, self.px, self.py], dtype=float)

    @classmethod
    def from_array(cls, values) -> "PhasePoint":
        """Build a state from any length-4 sequence (x, y, px, py)."""
        x, y, px, py = (float(v) for v in values)
        return cls(x=x, y=y, px=px, py=py)

    def flipped(self) -> "PhasePoint":
        """Return the time-reversed state (momenta negated)."""
        return PhasePoint(x=self.x, y=self.y, px=-self.px, py=-self.py)

"""
Finite-difference eigensolver for the two separated one-dimensional problems.

The xi-problem

    -(hbar^2/2) d^2/dxi^2 + omega^2 / (2 kappa gamma^2 C(xi)^2)

and the y-problem at coupling g = gamma * eps

    -(hbar^2/2) d^2/dy^2 + (hbar^2 kappa/2) T(y) d/dy + g^2 / (2 kappa C(y)^2) - omega^2/(2 kappa)

are discretized with the three-point second difference on interior grid
points (Dirichlet at both ends) and solved as symmetric tridiagonal
eigenproblems.

Both operators carry a constant proportional to 1/kappa. It is split off as
an offset and the remaining "reduced" operator, built from T(u)^2 via
1/C^2 = 1 + kappa T^2, is what gets discretized. Eigenvalues are offset +
reduced; the reduced part stays accurate as kappa -> 0.

The y-operator is made symmetric by the gauge Phi = C(y)^(1/2) Y (the
Laplace-Beltrami weight in parallel coordinates is C(y)). Writing
(C^(1/2))'' / C^(1/2) = -kappa/2 - kappa^2 T^2/4 gives

    -(hbar^2/2) Phi'' + [g^2 T^2/2 - hbar^2 kappa^2 T^2/8] Phi
        + [(g^2 - omega^2)/(2 kappa) - hbar^2 kappa/4] Phi.

Eigenvectors are returned in the symmetrized variable with unit discrete
L2 norm, sum(v^2) * h = 1; divide by `gauge` to recover Y.
"""

import logging
import math
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.linalg import LinAlgError, eigh_tridiagonal

from core.cache import CacheManager, make_key
from core.exceptions import (
    DomainError,
    EigensolveError,
    FlatCurvatureError,
    NotHyperbolicError,
    QuantumNumberRangeError,
)
from core.ktrig import kcos, ksin, ktan
from core.params import ModelParams
from core.qspectra import continuum_threshold

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

# eigenvalues closer than this to a continuum edge do not count as bound
BOUND_GUARD = 1e-6

# hyperboloid truncation length in units of 1/sqrt(|kappa|)
TRUNCATION_FACTOR = 20.0

# domain half-width cap in oscillator lengths sqrt(hbar / frequency)
OSCILLATOR_LENGTH_CAP = 60.0

DEFAULT_EIGS = 8

_xi_cache = CacheManager()


class EigenScheme(Enum):
    """Discretization of the y-operator."""
    SYMMETRIC = "symmetric"
    DIRECT = "direct"


class Grid1D(BaseModel):
    """
    Uniform grid of interior points on [a, b].

    Attributes:
        a (float): Left endpoint
        b (float): Right endpoint
        n_points (int): Number of interior points, >= 3
    """
    a: float
    b: float
    n_points: int

    model_config = ConfigDict(frozen=True)

    @field_validator('n_points')
    @classmethod
    def validate_n_points(cls, v):
        """Validate the number of interior points."""
        if v < 3:
            raise ValueError(f"n_points must be >= 3, got {v}")
        return v

    @model_validator(mode='after')
    def validate_interval(self):
        """Check that the interval is non-empty and finite."""
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"grid needs finite a < b, got [{self.a}, {self.b}]")
        return self

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n_points + 1)

    @property
    def points(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.n_points + 1)

    def refined(self) -> "Grid1D":
        """Same interval with the spacing halved exactly (2n + 1 interior points)."""
        return Grid1D(a=self.a, b=self.b, n_points=2 * self.n_points + 1)

    @classmethod
    def for_params(cls, p: ModelParams, n_points: int, length: Optional[float] = None) -> "Grid1D":
        """
        Default symmetric grid for the model.

        On the sphere the endpoints sit on the walls +-pi/(2 sqrt(kappa)); on the
        hyperboloid the half-width is `length` or 20/sqrt(|kappa|). Both are capped
        at 60 oscillator lengths of the softer of the two frequencies.
        """
        cap = OSCILLATOR_LENGTH_CAP * math.sqrt(p.hbar / min(p.omega, p.omega / p.gamma))
        if length is not None:
            half = length
        elif p.kappa > 0.0:
            half = min(math.pi / (2.0 * math.sqrt(p.kappa)), cap)
        elif p.kappa < 0.0:
            half = min(TRUNCATION_FACTOR / math.sqrt(-p.kappa), cap)
        else:
            half = cap
        return cls(a=-half, b=half, n_points=n_points)


class EigenResult(BaseModel):
    """
    Eigenpairs of a discretized one-dimensional problem.

    Attributes:
        params (ModelParams): Model parameters
        grid (Grid1D): Grid the problem was solved on
        axis (str): 'xi' or 'y'
        scheme (EigenScheme): Discretization used
        gamma_eps (Optional[float]): Coupling g of a y-problem
        offset (float): Constant part of the operator
        reduced (np.ndarray): Ascending eigenvalues of the reduced operator
        eigenvectors (np.ndarray): Columns of unit discrete L2 norm, shape (n_points, k)
        gauge (Optional[np.ndarray]): C(y)^(1/2) at the grid points (y-problems)
    """
    params: ModelParams
    grid: Grid1D
    axis: str
    scheme: EigenScheme = EigenScheme.SYMMETRIC
    gamma_eps: Optional[float] = None
    offset: float
    reduced: np.ndarray
    eigenvectors: np.ndarray
    gauge: Optional[np.ndarray] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator('axis')
    @classmethod
    def validate_axis(cls, v):
        """Validate the problem label."""
        if v not in ('xi', 'y'):
            raise ValueError(f"axis must be 'xi' or 'y', got {v}")
        return v

    @model_validator(mode='after')
    def validate_shapes(self):
        """Check ordering and array shapes."""
        if np.any(np.diff(self.reduced) < 0.0):
            raise ValueError("eigenvalues must be ascending")
        if self.eigenvectors.shape != (self.grid.n_points, self.reduced.size):
            raise ValueError(
                f"eigenvectors have shape {self.eigenvectors.shape}, "
                f"expected {(self.grid.n_points, self.reduced.size)}"
            )
        return self

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.offset + self.reduced

    @property
    def n_eigs(self) -> int:
        return self.reduced.size

    def physical(self, index: int) -> np.ndarray:
        """Eigenfunction in the original variable (gauge divided out for y-problems)."""
        vector = self.eigenvectors[:, index]
        return vector if self.gauge is None else vector / self.gauge

    def gram(self) -> np.ndarray:
        """Discrete L2 Gram matrix of the eigenvectors."""
        return self.eigenvectors.T @ self.eigenvectors * self.grid.h


def _require_curved(p: ModelParams) -> None:
    if p.kappa == 0.0:
        raise FlatCurvatureError(
            "the separated eigenproblems carry 1/kappa terms; use a small non-zero kappa for the flat limit"
        )


def _check_grid(p: ModelParams, grid: Grid1D) -> None:
    if p.kappa > 0.0:
        wall = math.pi / (2.0 * math.sqrt(p.kappa))
        if grid.a < -wall * (1.0 + 1e-12) or grid.b > wall * (1.0 + 1e-12):
            raise DomainError(
                f"grid [{grid.a}, {grid.b}] leaves the pole-free interval |u| < pi/(2 sqrt(kappa)) = {wall}"
            )
    elif p.kappa < 0.0 and abs(grid.a + grid.b) > 1e-12 * (grid.b - grid.a):
        raise DomainError(f"hyperboloid grids must be symmetric, b = -a; got [{grid.a}, {grid.b}]")


def _normalize(vectors: np.ndarray, h: float) -> np.ndarray:
    """Scale columns to unit discrete L2 norm with a deterministic sign."""
    vectors = vectors / np.sqrt(np.sum(vectors * vectors, axis=0) * h)
    for j in range(vectors.shape[1]):
        column = vectors[:, j]
        significant = np.nonzero(np.abs(column) > 1e-8 * np.max(np.abs(column)))[0]
        if significant.size and column[significant[0]] < 0.0:
            vectors[:, j] = -column
    return vectors


def _tridiagonal_eigs(diag: np.ndarray, off: np.ndarray, n_eigs: int) -> Tuple[np.ndarray, np.ndarray]:
    k = min(n_eigs, diag.size)
    try:
        values, vectors = eigh_tridiagonal(diag, off, select='i', select_range=(0, k - 1))
    except (LinAlgError, ValueError) as e:
        raise EigensolveError(f"tridiagonal eigensolve of size {diag.size} failed: {str(e)}")
    return values, vectors


def _derivative(v: np.ndarray, h: float) -> np.ndarray:
    """Central first difference with zero Dirichlet values outside the grid."""
    padded = np.concatenate(([0.0], v, [0.0]))
    return (padded[2:] - padded[:-2]) / (2.0 * h)


def _kinetic(v: np.ndarray, h: float, hbar: float) -> np.ndarray:
    """-(hbar^2/2) times the three-point second difference, Dirichlet."""
    padded = np.concatenate(([0.0], v, [0.0]))
    return -0.5 * hbar ** 2 * (padded[2:] - 2.0 * v + padded[:-2]) / (h * h)


def _inner(u: np.ndarray, v: np.ndarray, h: float) -> float:
    return float(np.dot(u, v) * h)


def solve_xi(p: ModelParams, grid: Grid1D, n_eigs: int = DEFAULT_EIGS) -> EigenResult:
    """
    Lowest eigenpairs of the xi-problem.

    Args:
        p: Model parameters (kappa != 0)
        grid: Grid inside the xi-domain
        n_eigs: Number of eigenpairs

    Returns:
        EigenResult with offset omega^2 / (2 kappa gamma^2)

    Raises:
        FlatCurvatureError: If kappa = 0
        DomainError: If the grid leaves the domain
        EigensolveError: If the eigensolver fails
    """
    _require_curved(p)
    _check_grid(p, grid)
    pts = grid.points
    h = grid.h
    a2 = (p.omega / p.gamma) ** 2
    t = ktan(p.kappa, pts)

    diag = p.hbar ** 2 / (h * h) + 0.5 * a2 * t * t
    off = np.full(grid.n_points - 1, -0.5 * p.hbar ** 2 / (h * h))
    values, vectors = _tridiagonal_eigs(diag, off, n_eigs)
    logger.info("solved xi-problem on %s points (kappa=%g), %s eigenpairs", grid.n_points, p.kappa, values.size)
    return EigenResult(
        params=p,
        grid=grid,
        axis='xi',
        offset=a2 / (2.0 * p.kappa),
        reduced=values,
        eigenvectors=_normalize(vectors, h),
    )


def solve_y(
    p: ModelParams,
    gamma_eps: float,
    grid: Grid1D,
    n_eigs: int = DEFAULT_EIGS,
    scheme: EigenScheme = EigenScheme.SYMMETRIC,
    shift: Optional[float] = None,
) -> EigenResult:
    """
    Lowest eigenpairs of the y-problem at coupling g = gamma * eps.

    Args:
        p: Model parameters (kappa != 0)
        gamma_eps: Coupling g > 0
        grid: Grid inside the y-domain
        n_eigs: Number of eigenpairs
        scheme: SYMMETRIC (gauge-transformed operator) or DIRECT (first-derivative
            term kept, reduced to symmetric form by a diagonal similarity)
        shift: (g^2 - omega^2) / (2 kappa) if the caller has it in a cancellation-free form

    Returns:
        EigenResult; vectors are in the symmetrized variable for both schemes

    Raises:
        DomainError: If g <= 0 or the grid leaves the domain
        EigensolveError: If the eigensolver fails or the grid is too coarse for DIRECT
    """
    _require_curved(p)
    if not (math.isfinite(gamma_eps) and gamma_eps > 0.0):
        raise DomainError(f"gamma_eps must be a positive number, got {gamma_eps}")
    _check_grid(p, grid)
    pts = grid.points
    h = grid.h
    k = p.kappa
    hb2 = p.hbar ** 2
    g2 = gamma_eps ** 2
    c = kcos(k, pts)
    t = ksin(k, pts) / c
    gauge = np.sqrt(c)
    base = (g2 - p.omega ** 2) / (2.0 * k) if shift is None else shift
    off_kinetic = -0.5 * hb2 / (h * h)

    if scheme is EigenScheme.SYMMETRIC:
        diag = hb2 / (h * h) + 0.5 * (g2 - 0.25 * hb2 * k * k) * t * t
        off = np.full(grid.n_points - 1, off_kinetic)
        values, vectors = _tridiagonal_eigs(diag, off, n_eigs)
        offset = base - 0.25 * hb2 * k
    elif scheme is EigenScheme.DIRECT:
        diag = hb2 / (h * h) + 0.5 * g2 * t * t
        drift = 0.25 * hb2 * k * t / h
        upper = off_kinetic + drift[:-1]
        lower = off_kinetic - drift[1:]
        if np.any(upper >= 0.0) or np.any(lower >= 0.0):
            raise EigensolveError(
                "grid too coarse for the direct scheme: |kappa T(y)| h / 2 must stay below 1"
            )
        off = -np.sqrt(upper * lower)
        values, sym_vectors = _tridiagonal_eigs(diag, off, n_eigs)
        # undo the diagonal similarity: d_(i+1)/d_i = sqrt(lower_(i+1)/upper_i)
        log_d = np.concatenate(([0.0], np.cumsum(0.5 * np.log(lower / upper))))
        y_vectors = sym_vectors * np.exp(log_d - log_d.max())[:, None]
        vectors = y_vectors * gauge[:, None]
        offset = base
    else:
        raise ValueError(f"Unsupported scheme: {scheme}")

    logger.info(
        "solved y-problem (%s) on %s points, g=%.6g, %s eigenpairs",
        scheme.value, grid.n_points, gamma_eps, values.size,
    )
    return EigenResult(
        params=p,
        grid=grid,
        axis='y',
        scheme=scheme,
        gamma_eps=gamma_eps,
        offset=offset,
        reduced=values,
        eigenvectors=_normalize(vectors, h),
        gauge=gauge,
    )


def richardson_eigenvalues(coarse: EigenResult, fine: EigenResult, order: int = 2) -> np.ndarray:
    """
    Extrapolate eigenvalues from a grid and its exact refinement.

    E = (r^p E_fine - E_coarse) / (r^p - 1) with r = h_coarse / h_fine.

    Raises:
        ValueError: If the two results do not share the interval and operator
    """
    if (coarse.grid.a, coarse.grid.b) != (fine.grid.a, fine.grid.b):
        raise ValueError("Richardson extrapolation needs the same interval on both grids")
    if coarse.axis != fine.axis or coarse.offset != fine.offset:
        raise ValueError("Richardson extrapolation needs the same operator on both grids")
    k = min(coarse.n_eigs, fine.n_eigs)
    factor = (coarse.grid.h / fine.grid.h) ** order
    reduced = (factor * fine.reduced[:k] - coarse.reduced[:k]) / (factor - 1.0)
    return coarse.offset + reduced


def _bound_threshold(result: EigenResult) -> float:
    p = result.params
    if p.kappa >= 0.0:
        raise NotHyperbolicError(f"every level is bound for kappa={p.kappa} >= 0")
    if result.axis == 'xi':
        return 0.0
    return continuum_threshold(p)


def count_bound_states(result: EigenResult, threshold: Optional[float] = None, guard: float = BOUND_GUARD) -> int:
    """
    Count eigenvalues below a continuum threshold minus a guard band.

    The default threshold is 0 for the xi-problem and the continuum edge of
    the two-dimensional spectrum for the y-problem (hyperboloid only).
    """
    if threshold is None:
        threshold = _bound_threshold(result)
    count = int(np.sum(result.eigenvalues < threshold - guard))
    if count == result.n_eigs:
        logger.warning("all %s computed eigenvalues are bound; request more to count them all", count)
    return count


def node_count(vector: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Number of sign changes of a grid function, ignoring entries below rel_tol * max|v|."""
    v = np.asarray(vector, dtype=float)
    significant = v[np.abs(v) > rel_tol * np.max(np.abs(v))]
    return int(np.sum(significant[1:] * significant[:-1] < 0.0))


def epsilon_from_xi(result: EigenResult, index: int) -> float:
    """eps = sqrt(a^2 + 2 kappa E_reduced) of a computed xi-level."""
    p = result.params
    e2 = (p.omega / p.gamma) ** 2 + 2.0 * p.kappa * result.reduced[index]
    if e2 <= 0.0:
        raise QuantumNumberRangeError(f"xi-level {index} has 2 kappa E <= 0 (not a bound level)")
    return math.sqrt(e2)


def _require_index(result: EigenResult, index: int, what: str) -> None:
    if not 0 <= index < result.n_eigs:
        raise QuantumNumberRangeError(
            f"{what} index {index} not available ({result.n_eigs} eigenpairs computed)"
        )
    if result.params.kappa < 0.0 and result.eigenvalues[index] >= _bound_threshold(result) - BOUND_GUARD:
        raise QuantumNumberRangeError(f"{what} index {index} is not a bound state")


def _cached_solve_xi(p: ModelParams, grid: Grid1D, n_eigs: int, cache: Optional[CacheManager]) -> EigenResult:
    cache = _xi_cache if cache is None else cache
    key = make_key('xi', p.kappa, p.omega, p.gamma, p.hbar, grid.a, grid.b, grid.n_points, n_eigs)
    return cache.get_or_compute(key, lambda: solve_xi(p, grid, n_eigs))


def _two_stage_on_grid(
    p: ModelParams, mu: int, nu: int, grid: Grid1D, scheme: EigenScheme, cache: Optional[CacheManager]
) -> float:
    n_eigs = max(DEFAULT_EIGS, mu + 1, nu + 1)
    xi = _cached_solve_xi(p, grid, n_eigs, cache)
    _require_index(xi, mu, "mu")
    e_red = float(xi.reduced[mu])
    eps = epsilon_from_xi(xi, mu)
    y = solve_y(p, p.gamma * eps, grid, n_eigs, scheme, shift=p.gamma ** 2 * e_red)
    _require_index(y, nu, "nu")
    return float(y.eigenvalues[nu])


def two_stage_level(
    p: ModelParams,
    mu: int,
    nu: int,
    n_points: int = 2000,
    scheme: EigenScheme = EigenScheme.SYMMETRIC,
    richardson: bool = False,
    length: Optional[float] = None,
    cache: Optional[CacheManager] = None,
) -> float:
    """
    Two-dimensional level from the separated eigensolves.

    Solves the xi-problem, takes eps_mu = sqrt(a^2 + 2 kappa E_reduced) from
    its mu-th eigenvalue and returns the nu-th eigenvalue of the y-problem at
    g = gamma eps_mu. xi-solves are memoized.

    Args:
        p: Model parameters (kappa != 0)
        mu: xi quantum number
        nu: y quantum number
        n_points: Interior grid points
        scheme: y-discretization
        richardson: Combine n and 2n + 1 points by Richardson extrapolation
        length: Hyperboloid half-width override
        cache: Cache for xi-solves (module default when None)

    Raises:
        QuantumNumberRangeError: If the requested pair is not a computed bound state
    """
    _require_curved(p)
    grid = Grid1D.for_params(p, n_points, length)
    coarse = _two_stage_on_grid(p, mu, nu, grid, scheme, cache)
    if not richardson:
        return coarse
    fine = _two_stage_on_grid(p, mu, nu, grid.refined(), scheme, cache)
    return (4.0 * fine - coarse) / 3.0


def _apply_ladder(p: ModelParams, vector: np.ndarray, grid: Grid1D, eps: float, sign: int) -> np.ndarray:
    """B+- = -+(hbar/sqrt 2) C(xi) d/dxi + (1/sqrt 2) S(xi) eps."""
    pts = grid.points
    c = kcos(p.kappa, pts)
    s = ksin(p.kappa, pts)
    return (-sign * p.hbar * c * _derivative(vector, grid.h) + s * eps * vector) / SQRT2


class LadderCheck(BaseModel):
    """
    Alignment of a ladder image with its predicted eigenfunction.

    Attributes:
        source (int): Index the operator acts on
        target (int): Index of the predicted image
        sine (float): ||(I - t t^T) v|| / ||v||
        cosine_gap (float): 1 - |<t, v>| / ||v||
    """
    source: int
    target: int
    sine: float
    cosine_gap: float


def ladder_action_check(p: ModelParams, xi_result: EigenResult, mu: int, lowering: bool = False) -> LadderCheck:
    """
    Apply B+ to the mu-th xi-eigenfunction (or B- to the (mu+1)-th) and
    measure its misalignment with the neighbouring eigenfunction.

    The eps entering the operator belongs to the state it acts on, taken from
    the computed eigenvalue. Raising always targets mu + 1: on the hyperboloid
    eps decreases along the ladder.

    Raises:
        QuantumNumberRangeError: If mu or mu + 1 is not an available bound xi-state
    """
    if xi_result.axis != 'xi':
        raise DomainError("ladder action needs an xi-problem result")
    _require_index(xi_result, mu, "mu")
    _require_index(xi_result, mu + 1, "mu")
    source, target = (mu + 1, mu) if lowering else (mu, mu + 1)
    eps = epsilon_from_xi(xi_result, source)
    h = xi_result.grid.h
    v = _apply_ladder(p, xi_result.eigenvectors[:, source], xi_result.grid, eps, -1 if lowering else 1)
    t = xi_result.eigenvectors[:, target]
    norm = math.sqrt(_inner(v, v, h))
    if norm == 0.0:
        raise EigensolveError(f"ladder image of state {source} vanished on the grid")
    overlap = _inner(t, v, h)
    sine = math.sqrt(_inner(v - overlap * t, v - overlap * t, h)) / norm
    return LadderCheck(source=source, target=target, sine=sine, cosine_gap=1.0 - abs(overlap) / norm)


def ladder_action_residual(p: ModelParams, xi_result: EigenResult, mu: int, lowering: bool = False) -> float:
    """Sine of the angle between B+ Xi_mu and Xi_(mu+1) (B- Xi_(mu+1) and Xi_mu when lowering)."""
    return ladder_action_check(p, xi_result, mu, lowering).sine


def _shift_down(p: ModelParams, phi: np.ndarray, grid: Grid1D, g: float) -> np.ndarray:
    """A- at coupling g in the symmetrized variable: (hbar/sqrt 2) Phi' + (1/sqrt 2)(hbar kappa/2 - g) T Phi."""
    t = ktan(p.kappa, grid.points)
    return (p.hbar * _derivative(phi, grid.h) + (0.5 * p.hbar * p.kappa - g) * t * phi) / SQRT2


def _shift_up(p: ModelParams, phi: np.ndarray, grid: Grid1D, g_target: float) -> np.ndarray:
    """A+ onto coupling g_target in the symmetrized variable: -(hbar/sqrt 2) Phi' - (1/sqrt 2)(g - hbar kappa/2) T Phi."""
    t = ktan(p.kappa, grid.points)
    return -(p.hbar * _derivative(phi, grid.h) + (g_target - 0.5 * p.hbar * p.kappa) * t * phi) / SQRT2


def _y_reduced_apply(p: ModelParams, g: float, vector: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Reduced symmetrized y-operator at coupling g applied to a grid function."""
    t = ktan(p.kappa, grid.points)
    potential = 0.5 * (g * g - 0.25 * (p.hbar * p.kappa) ** 2) * t * t
    return _kinetic(vector, grid.h, p.hbar) + potential * vector


def intertwine_residual(
    p: ModelParams,
    gamma_eps: float,
    grid: Grid1D,
    n_states: int = 4,
) -> float:
    """
    Check A- H(g) = H(g - hbar kappa) A- on the lowest eigenvectors of H(g).

    For each eigenpair (E, Phi) of H(g), w = A- Phi should satisfy
    H(g - hbar kappa) w = E w. The residual is
    ||E w - H' w|| / max(||H' w||, |E| ||w||), evaluated with both operators
    reduced by the offset of H' so that no 1/kappa constant enters.

    Returns:
        Largest relative residual over the n_states lowest states

    Raises:
        DomainError: If g or g - hbar kappa is not positive
    """
    _require_curved(p)
    g_next = gamma_eps - p.hbar * p.kappa
    if not gamma_eps > 0.0 or not g_next > 0.0:
        raise DomainError(f"gamma_eps={gamma_eps} and gamma_eps - hbar kappa={g_next} must both be positive")
    y = solve_y(p, gamma_eps, grid, n_states)
    # offset(g) - offset(g - hbar kappa) without the 1/kappa terms
    offset_gap = p.hbar * gamma_eps - 0.5 * p.hbar ** 2 * p.kappa
    h = grid.h
    worst = 0.0
    for index in range(y.n_eigs):
        energy = offset_gap + y.reduced[index]
        w = _shift_down(p, y.eigenvectors[:, index], grid, gamma_eps)
        hw = _y_reduced_apply(p, g_next, w, grid)
        residual = math.sqrt(_inner(energy * w - hw, energy * w - hw, h))
        scale = max(math.sqrt(_inner(hw, hw, h)), abs(energy) * math.sqrt(_inner(w, w, h)))
        worst = max(worst, residual / scale)
    logger.info("intertwining residual %.3e over %s states (g=%.6g)", worst, y.n_eigs, gamma_eps)
    return worst


def composite_rayleigh_quotient(
    p: ModelParams,
    mu: int,
    nu: int,
    n_points: int = 2000,
    grid: Optional[Grid1D] = None,
) -> Tuple[float, Tuple[int, int]]:
    """
    Energy of (A+)^m (B+)^n applied to the (mu, nu) product eigenstate.

    For gamma = m/n the image is the degenerate state (mu + n, nu - m). The
    xi-factor is raised n times with B+, the y-factor m times with A+, and
    the Rayleigh quotient of the full Hamiltonian is taken on the product

        <K_y> + gamma^2 <K_xi> <C(y)^-2> + (omega^2/2) <T(y)^2>

    where K_xi is the reduced xi-operator and K_y the symmetrized y-kinetic
    term with its gauge correction.

    Returns:
        Tuple (Rayleigh quotient, (mu + n, nu - m))

    Raises:
        DomainError: If no ratio is present
        QuantumNumberRangeError: If nu < m or a needed state is not bound
    """
    _require_curved(p)
    if p.ratio is None:
        raise DomainError("the composite symmetry needs a commensurate ratio (m, n)")
    m, n = p.ratio
    if nu < m:
        raise QuantumNumberRangeError(f"nu={nu} must be >= m={m} to apply (A+)^{m}")
    grid = Grid1D.for_params(p, n_points) if grid is None else grid
    h = grid.h
    k = p.kappa
    hb = p.hbar

    xi = solve_xi(p, grid, max(DEFAULT_EIGS, mu + n + 1))
    for j in range(mu, mu + n + 1):
        _require_index(xi, j, "mu")
    xi_vec = xi.eigenvectors[:, mu]
    for j in range(n):
        xi_vec = _apply_ladder(p, xi_vec, grid, epsilon_from_xi(xi, mu + j), 1)

    g0 = p.gamma * epsilon_from_xi(xi, mu)
    y = solve_y(p, g0, grid, max(DEFAULT_EIGS, nu + 1), shift=p.gamma ** 2 * float(xi.reduced[mu]))
    _require_index(y, nu, "nu")
    phi = y.eigenvectors[:, nu]
    for j in range(1, m + 1):
        phi = _shift_up(p, phi, grid, g0 + j * hb * k)

    t_xi = ktan(k, grid.points)
    a2 = (p.omega / p.gamma) ** 2
    k_xi = _kinetic(xi_vec, h, hb) + 0.5 * a2 * t_xi * t_xi * xi_vec
    e_xi = _inner(xi_vec, k_xi, h) / _inner(xi_vec, xi_vec, h)

    t = ktan(k, grid.points)
    c = kcos(k, grid.points)
    norm_y = _inner(phi, phi, h)
    k_y = _kinetic(phi, h, hb) - (0.25 * hb * hb * k + 0.125 * (hb * k) ** 2 * t * t) * phi
    quotient = (
        _inner(phi, k_y, h)
        + p.gamma ** 2 * e_xi * _inner(phi, phi / (c * c), h)
        + 0.5 * p.omega ** 2 * _inner(phi, t * t * phi, h)
    ) / norm_y
    return quotient, (mu + n, nu - m)

"""
Time integration of Hamilton's equations for the curved oscillator.

The default integrator is the implicit midpoint rule, which is symplectic and
symmetric for the non-separable curved Hamiltonian. Each step is solved by
fixed-point iteration, with a Newton fallback. Classical RK4 is kept as an
explicit cross-check.

Trajectories carry logs of the conserved quantities (H, Hxi and, when
available, X, Y and J) so drifts can be measured after the run.
"""

import logging
import math
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import minimize_scalar

from core import classical
from core.exceptions import NewtonDivergenceError, UnknownQuantityError, WallProximityError
from core.geometry import embed
from core.ktrig import kcos, ksin
from core.params import ModelParams, PhasePoint

logger = logging.getLogger(__name__)

# |C| below this aborts an integration
WALL_FLOOR = 1e-8

# denominator floor for relative drifts
DRIFT_FLOOR = 1e-12

Vector = Tuple[float, float, float, float]


class IntegratorMethod(Enum):
    """Available time integrators."""
    IMPLICIT_MIDPOINT = "implicit_midpoint"
    RK4 = "rk4"


class IntegratorConfig(BaseModel):
    """
    Integration settings.

    Attributes:
        dt (float): Time step, > 0
        t_end (float): Duration, > 0
        method (IntegratorMethod): Integrator
        newton_tol (float): Convergence tolerance of the implicit solve
        newton_max_iter (int): Iteration budget of each solver stage
        record_every (int): Store every k-th step
    """
    dt: float
    t_end: float
    method: IntegratorMethod = IntegratorMethod.IMPLICIT_MIDPOINT
    newton_tol: float = 1e-13
    newton_max_iter: int = 50
    record_every: int = 1

    model_config = ConfigDict(frozen=True)

    @field_validator('dt', 't_end', 'newton_tol')
    @classmethod
    def validate_positive(cls, v, info):
        """Validate strictly positive settings."""
        if not (math.isfinite(v) and v > 0.0):
            raise ValueError(f"{info.field_name} must be > 0, got {v}")
        return v

    @field_validator('newton_max_iter', 'record_every')
    @classmethod
    def validate_count(cls, v, info):
        """Validate positive integer settings."""
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1, got {v}")
        return v

    @classmethod
    def default_for(cls, p: ModelParams, t_end: float, **kwargs) -> "IntegratorConfig":
        """Config with the default step 1e-3 * 2 pi / omega."""
        return cls(dt=1e-3 * 2.0 * math.pi / p.omega, t_end=t_end, **kwargs)


class Trajectory(BaseModel):
    """
    Sampled solution of Hamilton's equations.

    Attributes:
        params (ModelParams): Parameters the trajectory was computed with
        times (np.ndarray): Strictly increasing sample times, shape (N,)
        states (np.ndarray): States (x, y, px, py), shape (N, 4)
        logs (Dict[str, np.ndarray]): Conserved-quantity series aligned with states
    """
    params: ModelParams
    times: np.ndarray
    states: np.ndarray
    logs: Dict[str, np.ndarray] = {}

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator('times')
    @classmethod
    def validate_times(cls, v):
        """Validate that times are strictly increasing."""
        v = np.asarray(v, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("times must be a non-empty 1-D array")
        if np.any(np.diff(v) <= 0.0):
            raise ValueError("times must be strictly increasing")
        return v

    @field_validator('states')
    @classmethod
    def validate_states(cls, v):
        """Validate the state array shape."""
        v = np.asarray(v, dtype=float)
        if v.ndim != 2 or v.shape[1] != 4:
            raise ValueError(f"states must have shape (N, 4), got {v.shape}")
        return v

    @model_validator(mode='after')
    def validate_alignment(self):
        """Check that states and logs align with times."""
        n = self.times.size
        if self.states.shape[0] != n:
            raise ValueError(f"{self.states.shape[0]} states for {n} times")
        for name, series in self.logs.items():
            if np.asarray(series).shape[0] != n:
                raise ValueError(f"log '{name}' has {np.asarray(series).shape[0]} entries for {n} times")
        return self

    def __len__(self) -> int:
        return self.times.size

    def state_at(self, index: int) -> PhasePoint:
        return PhasePoint.from_array(self.states[index])

    def ambient(self) -> np.ndarray:
        """Ambient embedding (x0, x1, x2) of every sample, shape (N, 3)."""
        x0, x1, x2 = embed(self.params.kappa, self.states[:, 0], self.states[:, 1])
        return np.column_stack([x0, x1, x2])

    def to_frame(self) -> pd.DataFrame:
        """Tabulate times, states and logs."""
        frame = pd.DataFrame({
            't': self.times,
            'x': self.states[:, 0],
            'y': self.states[:, 1],
            'px': self.states[:, 2],
            'py': self.states[:, 3],
        })
        for name, series in self.logs.items():
            frame[name] = series
        return frame


def _field_factory(p: ModelParams) -> Callable[[float, float, float, float], Vector]:
    """Build the Hamiltonian vector field J grad H on plain floats."""
    k = p.kappa
    g = p.gamma
    w2 = p.omega ** 2

    def field(x: float, y: float, px: float, py: float) -> Vector:
        cy = kcos(k, y)
        cg = kcos(k, g * x)
        if abs(cy) < WALL_FLOOR or abs(cg) < WALL_FLOOR:
            raise WallProximityError(
                f"state reached a coordinate wall (|C(y)|={abs(cy):.2e}, |C(gamma x)|={abs(cg):.2e}, "
                f"floor {WALL_FLOOR:g}); choose initial data inside the regular region"
            )
        ty = ksin(k, y) / cy
        tg = ksin(k, g * x) / cg
        cy2 = cy * cy
        dh_dx = w2 * g * tg / (cg * cg * cy2)
        dh_dy = ty / cy2 * (k * (px * px + w2 * tg * tg) + w2)
        return px / cy2, py, -dh_dx, -dh_dy

    return field


def _field_jacobian(field, z: np.ndarray, step: float = 1e-7) -> np.ndarray:
    jac = np.empty((4, 4))
    for i in range(4):
        h = step * (1.0 + abs(z[i]))
        e = np.zeros(4)
        e[i] = h
        jac[:, i] = (np.array(field(*(z + e))) - np.array(field(*(z - e)))) / (2.0 * h)
    return jac


def _midpoint_step(field, z0: np.ndarray, dt: float, tol: float, max_iter: int) -> np.ndarray:
    """One implicit midpoint step z1 = z0 + dt f((z0 + z1)/2)."""
    z1 = z0 + dt * np.array(field(*z0))
    scale = max(1.0, float(np.max(np.abs(z0))))
    previous = math.inf
    for _ in range(max_iter):
        mid = 0.5 * (z0 + z1)
        z_new = z0 + dt * np.array(field(*mid))
        change = float(np.max(np.abs(z_new - z1)))
        z1 = z_new
        if change <= tol * scale:
            return z1
        if change > previous:
            break
        previous = change

    logger.debug("fixed-point iteration stalled, switching to Newton")
    for _ in range(max_iter):
        mid = 0.5 * (z0 + z1)
        residual = z1 - z0 - dt * np.array(field(*mid))
        if float(np.max(np.abs(residual))) <= tol * scale:
            return z1
        jac = np.eye(4) - 0.5 * dt * _field_jacobian(field, mid)
        z1 = z1 - np.linalg.solve(jac, residual)
    raise NewtonDivergenceError(
        f"implicit midpoint step did not converge to {tol:g} within {max_iter} iterations (dt={dt})"
    )


def _rk4_step(field, z0: np.ndarray, dt: float) -> np.ndarray:
    k1 = np.array(field(*z0))
    k2 = np.array(field(*(z0 + 0.5 * dt * k1)))
    k3 = np.array(field(*(z0 + 0.5 * dt * k2)))
    k4 = np.array(field(*(z0 + dt * k3)))
    return z0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def conserved_logs(p: ModelParams, states: np.ndarray) -> Dict[str, np.ndarray]:
    """
    Evaluate the conserved quantities along a state array.

    H and Hxi are always logged; X and Y when a ratio is present; J when gamma = 1.
    """
    logs = {
        'H': classical.hamiltonian(p, states),
        'Hxi': classical.h_xi(p, states),
    }
    if p.ratio is not None:
        big_x, big_y = classical.real_symmetries(p, states)
        logs['X'] = np.asarray(big_x, dtype=float)
        logs['Y'] = np.asarray(big_y, dtype=float)
    if p.gamma == 1.0:
        logs['J'] = classical.angular_momentum(p.kappa, states)
    return logs


def integrate(p: ModelParams, s0: PhasePoint, cfg: IntegratorConfig, log_quantities: bool = True) -> Trajectory:
    """
    Integrate Hamilton's equations from s0.

    Args:
        p: Model parameters
        s0: Initial state inside the coordinate domain
        cfg: Integrator settings
        log_quantities: Whether to evaluate the conserved-quantity logs

    Returns:
        Trajectory sampled every cfg.record_every steps (the final step always included)

    Raises:
        DomainError: If s0 lies outside the domain
        WallProximityError: If the motion reaches a coordinate wall
        NewtonDivergenceError: If an implicit step fails
    """
    classical.validate_state(p, s0)
    field = _field_factory(p)
    field(*s0.as_array())

    n_steps = max(1, int(round(cfg.t_end / cfg.dt)))
    stride = cfg.record_every
    recorded = list(range(0, n_steps + 1, stride))
    if recorded[-1] != n_steps:
        recorded.append(n_steps)
    states = np.empty((len(recorded), 4))
    times = np.array(recorded, dtype=float) * cfg.dt

    logger.info(
        "integrating %s steps of %s (dt=%g, kappa=%g, gamma=%g)",
        n_steps, cfg.method.value, cfg.dt, p.kappa, p.gamma,
    )
    z = s0.as_array()
    states[0] = z
    row = 1
    for step in range(1, n_steps + 1):
        if cfg.method is IntegratorMethod.IMPLICIT_MIDPOINT:
            z = _midpoint_step(field, z, cfg.dt, cfg.newton_tol, cfg.newton_max_iter)
        elif cfg.method is IntegratorMethod.RK4:
            z = _rk4_step(field, z, cfg.dt)
        else:
            raise ValueError(f"Unsupported integrator: {cfg.method}")
        if row < len(recorded) and step == recorded[row]:
            states[row] = z
            row += 1
    # final wall check on the last state
    field(*z)

    logs = conserved_logs(p, states) if log_quantities else {}
    return Trajectory(params=p, times=times, states=states, logs=logs)


def conservation_drift(
    traj: Trajectory, name: str, floor: float = DRIFT_FLOOR, scale: Optional[float] = None
) -> float:
    """
    Relative drift of a logged quantity.

    Args:
        traj: Trajectory with logs
        name: Log name
        floor: Smallest accepted denominator
        scale: Denominator to use instead of |q(0)|

    Returns:
        max_t |q(t) - q(0)| / max(scale or |q(0)|, floor)

    Raises:
        UnknownQuantityError: If the log is absent
    """
    if name not in traj.logs:
        raise UnknownQuantityError(
            f"no log named '{name}' (available: {', '.join(sorted(traj.logs)) or 'none'})"
        )
    q = np.asarray(traj.logs[name], dtype=float)
    reference = abs(q[0]) if scale is None else scale
    return float(np.max(np.abs(q - q[0])) / max(reference, floor))


def drift_table(traj: Trajectory, floor: float = DRIFT_FLOOR) -> Dict[str, float]:
    """
    Relative drift of every logged quantity.

    X and Y are the real and imaginary parts of one complex integral, either of
    which may pass through zero; both are measured against hypot(X(0), Y(0)).
    """
    joint = None
    if 'X' in traj.logs and 'Y' in traj.logs:
        joint = math.hypot(float(traj.logs['X'][0]), float(traj.logs['Y'][0]))
    return {
        name: conservation_drift(traj, name, floor, joint if name in ('X', 'Y') else None)
        for name in sorted(traj.logs)
    }


def _component_scales(states: np.ndarray) -> np.ndarray:
    scales = np.max(np.abs(states), axis=0)
    return np.where(scales > 0.0, scales, 1.0)


def closure_detect(
    traj: Trajectory,
    tol: float = 1e-6,
    scales: Optional[np.ndarray] = None,
    departure: float = 1e-3,
) -> Optional[float]:
    """
    Find the first return of a trajectory to its initial state.

    Distances are Euclidean in (x, y, px, py) after dividing each component by
    its scale (default: the component's largest magnitude along the run).
    Candidate returns are local minima of the sampled distance after the orbit
    has first moved away by `departure`; each is refined on a cubic Hermite
    interpolant built from the samples and the exact vector field.

    Args:
        traj: Trajectory to scan
        tol: Closure tolerance on the scaled distance
        scales: Optional per-component scales
        departure: Scaled distance that marks the end of the initial departure

    Returns:
        The closure time t*, or None when no return is found
    """
    states = traj.states
    times = traj.times
    scales = _component_scales(states) if scales is None else np.asarray(scales, dtype=float)
    z0 = states[0]
    dist = np.linalg.norm((states - z0) / scales, axis=1)
    if dist.size < 3:
        return None

    moved = np.nonzero(dist > departure)[0]
    if moved.size == 0:
        return None
    start = max(int(moved[0]), 1)
    sample_step = float(np.max(np.linalg.norm(np.diff(states, axis=0) / scales, axis=1)))
    gate = sample_step + tol

    field = _field_factory(traj.params)
    for k in range(start, dist.size - 1):
        if not (dist[k] <= dist[k - 1] and dist[k] <= dist[k + 1] and dist[k] <= gate):
            continue
        window = slice(k - 1, k + 2)
        t_win = times[window]
        z_win = states[window]
        derivs = np.array([field(*z) for z in z_win])
        spline = CubicHermiteSpline(t_win, z_win, derivs, axis=0)

        def scaled_distance(t: float) -> float:
            return float(np.linalg.norm((spline(t) - z0) / scales))

        result = minimize_scalar(
            scaled_distance, bounds=(t_win[0], t_win[-1]), method='bounded',
            options={'xatol': 1e-13},
        )
        if result.fun < tol:
            logger.info("closure found at t*=%.12g (distance %.3e)", result.x, result.fun)
            return float(result.x)

    logger.warning("no closure within tol=%g over t_end=%g", tol, float(times[-1]))
    return None


def time_reversal_error(p: ModelParams, s0: PhasePoint, cfg: IntegratorConfig) -> float:
    """
    Integrate forward, flip momenta, integrate again and compare with s0.

    Returns:
        Max-norm distance between s0 and the returned (re-flipped) state
    """
    forward = integrate(p, s0, cfg, log_quantities=False)
    back = integrate(p, forward.state_at(-1).flipped(), cfg, log_quantities=False)
    returned = back.state_at(-1).flipped()
    return float(np.max(np.abs(returned.as_array() - s0.as_array())))


def energy_error_scaling(p: ModelParams, s0: PhasePoint, cfg: IntegratorConfig) -> Tuple[float, float, float]:
    """
    Compare the energy error at dt and dt/2 over the same duration.

    Returns:
        Tuple (max |H - H0| at dt, same at dt/2, ratio of the two)
    """
    coarse = integrate(p, s0, cfg)
    fine = integrate(p, s0, cfg.model_copy(update={'dt': cfg.dt / 2.0, 'record_every': cfg.record_every * 2}))
    e_coarse = float(np.max(np.abs(coarse.logs['H'] - coarse.logs['H'][0])))
    e_fine = float(np.max(np.abs(fine.logs['H'] - fine.logs['H'][0])))
    return e_coarse, e_fine, e_coarse / e_fine if e_fine > 0.0 else math.inf

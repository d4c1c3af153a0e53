"""
Invariant suites.

Each suite runs a family of numerical checks (identities, conservation laws,
closed-form versus finite-difference agreement, convergence orders) and
returns a SuiteResult with one CheckResult per check. Random draws come from
numpy generators seeded by (seed, suite index), so a report depends only on
the seed and the options, never on the number of worker threads.

Workloads are reduced by default; SuiteOptions raises them.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, field_validator

from core import classical, dynamics, qnumeric, qspectra
from core.exceptions import ConfigError, DomainError
from core.ktrig import kcos, ksin, ktan
from core.params import ModelParams, PhasePoint

logger = logging.getLogger(__name__)

# (m, n) pairs of the commensurate conservation and bracket checks
COMMENSURATE_RATIOS = ((1, 1), (2, 1), (1, 2), (3, 2))

# Richardson tolerance per gamma for the omega = 1 sphere levels; at gamma = 2 the
# xi-eigenfunctions are barely smoother than C^1 at the walls
UNIT_SPHERE_RICHARDSON_TOL = {1.0: 1e-6, 1.5: 1e-6, 2.0: 1e-5}


class SuiteOptions(BaseModel):
    """
    Workload knobs of the suites.

    Attributes:
        trig_samples (int): Random (kappa, u) draws for the identity suite
        bracket_samples (int): Random states per parameter set for bracket checks
        worked_samples (int): Random states per worked case
        n_points (int): Interior grid points of the eigensolves
        drift_t_end (float): Duration of the conservation runs
        closure_t_end (float): Duration of the irrational-ratio negative control
    """
    trig_samples: int = 2000
    bracket_samples: int = 10
    worked_samples: int = 200
    n_points: int = 2000
    drift_t_end: float = 5.0
    closure_t_end: float = 200.0

    @field_validator('trig_samples', 'bracket_samples', 'worked_samples')
    @classmethod
    def validate_samples(cls, v, info):
        """Validate sample counts."""
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1, got {v}")
        return v

    @field_validator('n_points')
    @classmethod
    def validate_n_points(cls, v):
        """Validate the grid size."""
        if v < 100:
            raise ValueError(f"n_points must be >= 100 for meaningful convergence checks, got {v}")
        return v

    @field_validator('drift_t_end', 'closure_t_end')
    @classmethod
    def validate_duration(cls, v, info):
        """Validate durations."""
        if not v > 0.0:
            raise ValueError(f"{info.field_name} must be > 0, got {v}")
        return v


class CheckResult(BaseModel):
    """
    Outcome of one check.

    Attributes:
        name (str): Check identifier
        passed (bool): Whether residual <= tolerance
        residual (float): Measured residual
        tolerance (float): Acceptance threshold
        detail (str): Parameters of the check
    """
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""


class SuiteResult(BaseModel):
    """Checks of one suite."""
    name: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'checks': [check.model_dump() for check in self.checks],
        }


def _check(name: str, residual: float, tolerance: float, detail: str = "") -> CheckResult:
    residual = float(residual)
    return CheckResult(
        name=name,
        passed=bool(math.isfinite(residual) and residual <= tolerance),
        residual=residual,
        tolerance=tolerance,
        detail=detail,
    )


def _band_check(name: str, value: float, low: float, high: float, detail: str = "") -> CheckResult:
    """Pass when low <= value <= high; the residual is the distance to the band centre."""
    centre = 0.5 * (low + high)
    return CheckResult(
        name=name,
        passed=bool(low <= value <= high),
        residual=float(abs(value - centre)),
        tolerance=0.5 * (high - low),
        detail=f"{detail} value={value:.6g}".strip(),
    )


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def sample_bound_state(p: ModelParams, rng: np.random.Generator, spread: float = 0.4) -> PhasePoint:
    """
    Draw a state well inside the regular region.

    On the hyperboloid the draw is repeated until 2 kappa H_xi exceeds a
    quarter of (omega/gamma)^2, so every ladder and symmetry function is real.

    Raises:
        DomainError: If no admissible state is found
    """
    if p.kappa > 0.0:
        length = math.pi / (2.0 * math.sqrt(p.kappa))
    elif p.kappa < 0.0:
        length = 1.0 / math.sqrt(-p.kappa)
    else:
        length = 1.0
    momentum = 0.5 * p.omega * min(length, 1.0)
    a2 = (p.omega / p.gamma) ** 2
    for _ in range(1000):
        s = PhasePoint(
            x=rng.uniform(-spread, spread) * length / p.gamma,
            y=rng.uniform(-spread, spread) * length,
            px=rng.uniform(-momentum, momentum),
            py=rng.uniform(-momentum, momentum),
        )
        if p.kappa < 0.0 and classical.cal_E_squared(p, s) <= 0.25 * a2:
            continue
        return s
    raise DomainError(f"could not draw a bound state for kappa={p.kappa}, gamma={p.gamma}")


def suite_ktrig(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Pythagorean, double-angle and tangent identities, including the series branch."""
    n = options.trig_samples
    sign = rng.choice([-1.0, 1.0], size=n)
    tiny = rng.random(n) < 0.5
    magnitude = np.where(tiny, 10.0 ** rng.uniform(-12.0, -6.0, n), rng.uniform(0.1, 2.0, n))
    kappas = sign * magnitude
    worst = {'pythagorean': 0.0, 'double_sine': 0.0, 'double_cosine': 0.0, 'tangent': 0.0}
    for k in kappas:
        reach = min(3.0, (0.45 * math.pi if k > 0.0 else 3.0) / math.sqrt(abs(k)))
        u = rng.uniform(-reach, reach)
        c, s = kcos(k, u), ksin(k, u)
        t = ktan(k, u)
        c2, s2 = kcos(k, 2.0 * u), ksin(k, 2.0 * u)
        scale = max(1.0, c * c, abs(k) * s * s)
        worst['pythagorean'] = max(worst['pythagorean'], abs(c * c + k * s * s - 1.0) / scale)
        worst['double_sine'] = max(worst['double_sine'], abs(s2 - 2.0 * s * c) / max(1.0, abs(s2)))
        worst['double_cosine'] = max(worst['double_cosine'], abs(c2 - (c * c - k * s * s)) / scale)
        worst['tangent'] = max(worst['tangent'], abs((1.0 + k * t * t) * c * c - 1.0))
    detail = f"{n} draws, half with |kappa| in [1e-12, 1e-6]"
    return [_check(name, value, 1e-13, detail) for name, value in worst.items()]


def suite_integrability(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """{H, H_xi} = 0 and the ladder/shift bracket relations at random bound states."""
    checks = []
    for kappa in (-1.0, -0.5, 0.5, 1.0):
        for gamma in (0.5, 1.0, 1.7, 2.0):
            p = ModelParams(kappa=kappa, omega=1.0, gamma=gamma)
            worst = {'H_Hxi': 0.0, 'Hxi_B': 0.0, 'B_B': 0.0, 'A_A': 0.0}
            for _ in range(options.bracket_samples):
                s = sample_bound_state(p, rng)
                e = classical.cal_E(p, s)
                worst['H_Hxi'] = max(worst['H_Hxi'], abs(classical.poisson_bracket(
                    lambda z: classical.hamiltonian(p, z), lambda z: classical.h_xi(p, z), s)))
                for sign in (1, -1):
                    bracket = classical.poisson_bracket(
                        lambda z: classical.h_xi(p, z), lambda z: classical.ladder_B(p, z, sign), s)
                    worst['Hxi_B'] = max(worst['Hxi_B'], abs(bracket + sign * 1j * e * classical.ladder_B(p, s, sign)))
                b_bracket = classical.poisson_bracket(
                    lambda z: classical.ladder_B(p, z, -1), lambda z: classical.ladder_B(p, z, 1), s)
                worst['B_B'] = max(worst['B_B'], abs(b_bracket + 1j * e))
                a_bracket = classical.poisson_bracket(
                    lambda z: classical.shift_A(p, z, -1), lambda z: classical.shift_A(p, z, 1), s)
                target = 1j * p.gamma * e / kcos(kappa, s.y) ** 2
                worst['A_A'] = max(worst['A_A'], abs(a_bracket - target))
            detail = f"kappa={kappa} gamma={gamma}"
            checks.extend(_check(name, value, 1e-6, detail) for name, value in worst.items())
    return checks


def suite_superintegrability(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Brackets of H with X+, conservation along trajectories and the flat polynomial algebra."""
    checks = []
    for kappa in (-1.0, 1.0):
        for m, n in COMMENSURATE_RATIOS:
            p = ModelParams.from_ratio(kappa, 1.0, m, n)
            worst = 0.0
            for _ in range(options.bracket_samples):
                s = sample_bound_state(p, rng)
                worst = max(worst, abs(classical.poisson_bracket(
                    lambda z: classical.hamiltonian(p, z), lambda z: classical.symmetry_X(p, z, 1), s)))
            checks.append(_check('H_Xplus', worst, 1e-6, f"kappa={kappa} ratio={m}:{n}"))

    starts = {1.0: PhasePoint(x=0.2, y=0.3, px=0.1, py=0.0), -1.0: PhasePoint(x=0.3, y=0.2, px=0.1, py=0.1)}
    # the midpoint rule detunes the resonance by O(dt^2), so X and Y drift secularly
    cfg = dynamics.IntegratorConfig(dt=1e-4, t_end=options.drift_t_end, record_every=100)
    for kappa, s0 in starts.items():
        for m, n in COMMENSURATE_RATIOS:
            p = ModelParams.from_ratio(kappa, 1.0, m, n)
            traj = dynamics.integrate(p, s0, cfg)
            for name, drift in dynamics.drift_table(traj).items():
                if name == 'J':
                    continue
                checks.append(_check(f"drift_{name}", drift, 1e-7, f"kappa={kappa} ratio={m}:{n} dt=1e-4"))
        p = ModelParams.from_ratio(kappa, 1.0, 2, 1)
        coarse = dynamics.IntegratorConfig(dt=1e-2, t_end=min(5.0, options.drift_t_end))
        _, _, ratio = dynamics.energy_error_scaling(p, s0, coarse)
        checks.append(_band_check('energy_error_order', ratio, 3.0, 5.0, f"kappa={kappa} dt and dt/2"))

    isotropic = ModelParams.from_ratio(-1.0, 1.0, 1, 1)
    fine = dynamics.IntegratorConfig(dt=5e-5, t_end=2.0 * math.pi, record_every=200)
    traj = dynamics.integrate(isotropic, PhasePoint(x=0.5, y=0.0, px=0.0, py=0.5), fine)
    checks.append(_check('drift_J', dynamics.conservation_drift(traj, 'J'), 1e-9,
                         "kappa=-1 gamma=1 dt=5e-5 one period"))

    flat = ModelParams.from_ratio(0.0, 1.0, 2, 1)
    predicted_worst = 0.0
    for _ in range(options.bracket_samples):
        s = sample_bound_state(flat, rng)
        predicted = classical.flat_polynomial_algebra(flat, s)
        h_xi = lambda z: classical.h_xi(flat, z)  # noqa: E731
        h_y = lambda z: classical.h_y_flat(flat, z)  # noqa: E731
        big_x = lambda z: classical.symmetry_X(flat, z, 1).real  # noqa: E731
        big_y = lambda z: classical.symmetry_X(flat, z, 1).imag  # noqa: E731
        measured = {
            'Hxi_X': classical.poisson_bracket(h_xi, big_x, s),
            'Hxi_Y': classical.poisson_bracket(h_xi, big_y, s),
            'Hy_X': classical.poisson_bracket(h_y, big_x, s),
            'Hy_Y': classical.poisson_bracket(h_y, big_y, s),
            'X_Y': classical.poisson_bracket(big_x, big_y, s),
        }
        for name, value in measured.items():
            predicted_worst = max(predicted_worst, abs(value - predicted[name]))
    checks.append(_check('flat_polynomial_algebra', predicted_worst, 1e-6, "kappa=0 ratio=2:1"))
    return checks


def suite_closure(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Closed orbits for rational gamma, none for gamma = sqrt(2)."""
    checks = []
    flat = ModelParams(kappa=0.0, omega=1.0, gamma=1.0, ratio=(1, 1))
    traj = dynamics.integrate(flat, PhasePoint(x=1.0, y=0.0, px=0.0, py=1.0),
                              dynamics.IntegratorConfig(dt=1e-3, t_end=7.0), log_quantities=False)
    period = dynamics.closure_detect(traj, tol=1e-6)
    checks.append(_check('flat_circle_period', math.inf if period is None else abs(period - 2.0 * math.pi),
                         1e-6, "kappa=0 gamma=1"))

    s0 = PhasePoint(x=0.2, y=0.3, px=0.1, py=0.0)
    starts = {1.0: s0, -1.0: PhasePoint(x=0.3, y=0.2, px=0.1, py=0.1)}
    for kappa, start in starts.items():
        p = ModelParams.from_ratio(kappa, 1.0, 2, 1)
        traj = dynamics.integrate(p, start, dynamics.IntegratorConfig(dt=2e-4, t_end=10.0, record_every=5),
                                  log_quantities=False)
        period = dynamics.closure_detect(traj, tol=1e-6)
        checks.append(_check('rational_closure', 0.0 if period is not None else 1.0, 0.0,
                             f"kappa={kappa:g} ratio=2:1 t*={period}"))

    irrational = ModelParams(kappa=1.0, omega=1.0, gamma=math.sqrt(2.0))
    traj = dynamics.integrate(irrational, s0, dynamics.IntegratorConfig(dt=2e-3, t_end=options.closure_t_end),
                              log_quantities=False)
    period = dynamics.closure_detect(traj, tol=1e-6)
    checks.append(_check('irrational_no_closure', 0.0 if period is None else 1.0, 0.0,
                         f"kappa=1 gamma=sqrt(2) t_end={options.closure_t_end}"))

    curved = ModelParams.from_ratio(1.0, 1.0, 2, 1)
    cfg = dynamics.IntegratorConfig(dt=1e-3, t_end=2.0)
    checks.append(_check('time_reversal', dynamics.time_reversal_error(curved, s0, cfg), 1e-8, "kappa=1 ratio=2:1"))
    return checks


def suite_worked_cases(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Power-product symmetries against the explicit polynomial integrals for gamma = 1, 2, 1/2."""
    checks = []
    for kappa in (1.0, -1.0, 0.0):
        for m, n in ((1, 1), (2, 1), (1, 2)):
            p = ModelParams.from_ratio(kappa, 1.0, m, n)
            worst_x = worst_y = worst_j = 0.0
            for _ in range(options.worked_samples):
                s = sample_bound_state(p, rng)
                big_x, big_y = classical.real_symmetries(p, s)
                case_x, case_y = classical.worked_case_symmetries(p, s)
                if (m + n) % 2 == 1:
                    case_x = classical.cal_E(p, s) * case_x
                worst_x = max(worst_x, abs(big_x - case_x) / max(1.0, abs(case_x)))
                worst_y = max(worst_y, abs(big_y - case_y) / max(1.0, abs(case_y)))
                if (m, n) == (1, 1):
                    j = classical.angular_momentum(kappa, s)
                    worst_j = max(worst_j, abs(big_y + 0.5 * j) / max(1.0, abs(j)))
            detail = f"kappa={kappa} ratio={m}:{n}"
            checks.append(_check('worked_X', worst_x, 1e-12, detail))
            checks.append(_check('worked_Y', worst_y, 1e-12, detail))
            if (m, n) == (1, 1):
                checks.append(_check('isotropic_Y_is_half_J', worst_j, 1e-12, detail))
    return checks


def suite_sphere_spectrum(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Closed-form sphere levels against the two-stage finite-difference solver."""
    checks = []
    for omega in (1.0, 3.0):
        for gamma in (1.0, 1.5, 2.0):
            p = ModelParams(kappa=1.0, omega=omega, gamma=gamma)
            plain = richardson = 0.0
            for mu in range(4):
                for nu in range(4):
                    exact = qspectra.level(p, mu, nu)
                    plain = max(plain, _relative(qnumeric.two_stage_level(p, mu, nu, options.n_points), exact))
                    extrapolated = qnumeric.two_stage_level(p, mu, nu, options.n_points, richardson=True)
                    richardson = max(richardson, _relative(extrapolated, exact))
            tolerance = UNIT_SPHERE_RICHARDSON_TOL[gamma] if omega == 1.0 else 1e-6
            detail = f"kappa=1 omega={omega:g} gamma={gamma} mu,nu<=3 n={options.n_points}"
            checks.append(_check('two_stage_level', plain, 1e-4, detail))
            checks.append(_check('two_stage_level_richardson', richardson, tolerance, detail))

    p = ModelParams(kappa=1.0, omega=1.0, gamma=1.0)
    grid = qnumeric.Grid1D.for_params(p, options.n_points)
    xi = qnumeric.solve_xi(p, grid, 5)
    fine = qnumeric.solve_xi(p, grid.refined(), 5)
    exact = np.array([qspectra.xi_level(p, mu) for mu in range(5)])
    detail = f"kappa=1 omega=1 n={options.n_points}"
    checks.append(_check('xi_levels', float(np.max(np.abs(xi.eigenvalues - exact) / exact)), 1e-4, detail))
    extrapolated = qnumeric.richardson_eigenvalues(xi, fine)
    checks.append(_check('xi_levels_richardson', float(np.max(np.abs(extrapolated - exact) / exact)), 1e-6, detail))
    return checks


def suite_degeneracy(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Degeneracy classes for rational gamma and level separation for gamma = sqrt(2)."""
    checks = []
    p = ModelParams.from_ratio(1.0, 1.0, 2, 1)
    spectrum = qspectra.enumerate_levels(p, max_key=12)
    checks.append(_check('class_spread', max(c.spread for c in spectrum.classes), 1e-12, "kappa=1 ratio=2:1 key<=12"))
    checks.append(_check('pair_0_2_vs_1_0', _relative(qspectra.level(p, 0, 2), qspectra.level(p, 1, 0)), 1e-12,
                         "kappa=1 ratio=2:1"))

    hyper = ModelParams.from_ratio(-1.0, 5.0, 1, 1)
    spectrum = qspectra.enumerate_levels(hyper)
    checks.append(_check('hyperboloid_class_spread', max(c.spread for c in spectrum.classes), 1e-12,
                         "kappa=-1 omega=5 ratio=1:1"))

    fd = ModelParams.from_ratio(1.0, 1.0, 2, 1)
    e02 = qnumeric.two_stage_level(fd, 0, 2, options.n_points)
    e10 = qnumeric.two_stage_level(fd, 1, 0, options.n_points)
    checks.append(_check('fd_pair_0_2_vs_1_0', _relative(e02, e10), 1e-4, f"kappa=1 omega=1 n={options.n_points}"))

    irrational = ModelParams(kappa=1.0, omega=1.0, gamma=math.sqrt(2.0))
    window = qspectra.enumerate_levels(irrational, energy_cutoff=10.0)
    gap = qspectra.min_level_gap(window)
    checks.append(CheckResult(
        name='irrational_min_gap', passed=bool(gap > 1e-8), residual=float(gap), tolerance=1e-8,
        detail=f"kappa=1 gamma=sqrt(2) E<=10, {len(window.entries)} levels (passes when the gap exceeds the floor)",
    ))

    flat = ModelParams.from_ratio(0.0, 1.0, 1, 1)
    sizes = [c.size for c in qspectra.enumerate_levels(flat, max_key=3).classes]
    checks.append(_check('flat_isotropic_sizes', 0.0 if sizes == [1, 2, 3, 4] else 1.0, 0.0, f"sizes={sizes}"))
    return checks


def suite_hyperboloid(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Bound-state counts and levels on the hyperboloid."""
    checks = []
    p = ModelParams(kappa=-1.0, omega=5.0, gamma=1.0)
    mu_max, _ = qspectra.max_quantum_numbers(p)
    checks.append(_check('mu_max', abs(mu_max - 4), 0.0, "kappa=-1 omega=5 gamma=1"))
    grid = qnumeric.Grid1D.for_params(p, 2 * options.n_points, length=20.0)
    xi = qnumeric.solve_xi(p, grid, 10)
    checks.append(_check('xi_bound_count', abs(qnumeric.count_bound_states(xi) - (mu_max + 1)), 0.0,
                         f"L=20 n={grid.n_points}"))
    exact = qspectra.level(p, 0, 0)
    checks.append(_check('ground_level', _relative(qnumeric.two_stage_level(p, 0, 0, options.n_points, length=20.0),
                                                   exact), 1e-4, f"L=20 n={options.n_points}"))

    p2 = ModelParams(kappa=-1.0, omega=5.0, gamma=2.0)
    mu_max2, nu_max = qspectra.max_quantum_numbers(p2)
    grid2 = qnumeric.Grid1D.for_params(p2, options.n_points, length=20.0)
    worst = 0
    for mu in range(mu_max2 + 1):
        g = p2.gamma * qspectra.epsilon_mu(p2, mu)
        y = qnumeric.solve_y(p2, g, grid2, 10)
        worst = max(worst, abs(qnumeric.count_bound_states(y) - (max(nu_max(mu), -1) + 1)))
    checks.append(_check('nu_bound_counts', worst, 0.0, f"kappa=-1 omega=5 gamma=2 mu<={mu_max2}"))
    return checks


def suite_flat_limits(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Linear approach of levels, chi and cal_E to their flat values."""
    checks = []
    p0 = ModelParams(kappa=0.0, omega=1.0, gamma=2.0)
    s = PhasePoint(x=0.3, y=0.2, px=0.1, py=0.1)
    flat_e = p0.omega / p0.gamma
    for sign in (1.0, -1.0):
        quantities = {
            'level': lambda q: qspectra.level(q, 1, 1) - qspectra.flat_level(p0, 1, 1),
            'chi': lambda q: qspectra.chi_of(q).chi - flat_e,
            'cal_E': lambda q: classical.cal_E(q, s) - flat_e,
        }
        for name, diff in quantities.items():
            values = [abs(diff(p0.with_kappa(sign * 10.0 ** -k))) for k in range(4, 9)]
            ratios = [a / b for a, b in zip(values, values[1:])]
            worst = max(abs(r - 10.0) for r in ratios)
            checks.append(_check(f"{name}_linear_decay", worst, 0.5, f"sign={sign:+.0f} kappa=1e-4..1e-8"))
    return checks


def suite_operator_algebra(rng: np.random.Generator, options: SuiteOptions) -> List[CheckResult]:
    """Grid ladder and intertwining relations, their O(h^2) decay, and the composite degeneracy map."""
    checks = []
    coarse_n = options.n_points // 2
    p = ModelParams(kappa=1.0, omega=3.0, gamma=1.0)
    grid = qnumeric.Grid1D.for_params(p, coarse_n)
    coarse = qnumeric.solve_xi(p, grid, 4)
    fine = qnumeric.solve_xi(p, grid.refined(), 4)
    for lowering in (False, True):
        r_coarse = qnumeric.ladder_action_residual(p, coarse, 0, lowering=lowering)
        r_fine = qnumeric.ladder_action_residual(p, fine, 0, lowering=lowering)
        label = 'lowering' if lowering else 'raising'
        checks.append(_check(f"ladder_{label}", r_fine, 1e-3, f"kappa=1 omega=3 n={fine.grid.n_points}"))
        checks.append(_band_check(f"ladder_{label}_order", r_coarse / r_fine, 3.7, 4.3, "grid halving"))

    p5 = ModelParams(kappa=1.0, omega=5.0, gamma=1.0)
    g = p5.gamma * qspectra.epsilon_mu(p5, 0)
    grid5 = qnumeric.Grid1D.for_params(p5, coarse_n)
    i_coarse = qnumeric.intertwine_residual(p5, g, grid5)
    i_fine = qnumeric.intertwine_residual(p5, g, grid5.refined())
    checks.append(_check('intertwine', i_fine, 1e-3, f"kappa=1 omega=5 n={grid5.refined().n_points}"))
    checks.append(_band_check('intertwine_order', i_coarse / i_fine, 3.7, 4.3, "grid halving"))

    hyper = ModelParams.from_ratio(-1.0, 5.0, 2, 1)
    grid_h = qnumeric.Grid1D.for_params(hyper, options.n_points, length=20.0)
    quotient, target = qnumeric.composite_rayleigh_quotient(hyper, 0, 2, grid=grid_h)
    checks.append(_check('composite_rayleigh', _relative(quotient, qspectra.level(hyper, *target)), 1e-4,
                         f"kappa=-1 omega=5 ratio=2:1 (0,2)->{target}"))
    return checks


SUITES: Dict[str, Callable[[np.random.Generator, SuiteOptions], List[CheckResult]]] = {
    'ktrig': suite_ktrig,
    'integrability': suite_integrability,
    'superintegrability': suite_superintegrability,
    'closure': suite_closure,
    'worked_cases': suite_worked_cases,
    'sphere_spectrum': suite_sphere_spectrum,
    'degeneracy': suite_degeneracy,
    'hyperboloid': suite_hyperboloid,
    'flat_limits': suite_flat_limits,
    'operator_algebra': suite_operator_algebra,
}


def resolve_suites(names: Sequence[str]) -> List[str]:
    """
    Expand 'all' and validate suite names, keeping the registry order.

    Raises:
        ConfigError: If a name is unknown
    """
    if not names or 'all' in names:
        return list(SUITES)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {', '.join(unknown)}; choose from all, {', '.join(SUITES)}")
    return [name for name in SUITES if name in names]


def run_suite(name: str, seed: int, options: Optional[SuiteOptions] = None) -> SuiteResult:
    """Run one suite with its derived random generator."""
    options = options or SuiteOptions()
    index = list(SUITES).index(name)
    rng = np.random.default_rng([seed, index])
    logger.info("running suite %s (seed %s)", name, seed)
    result = SuiteResult(name=name, checks=SUITES[name](rng, options))
    logger.info("suite %s %s", name, "passed" if result.passed else "FAILED")
    return result


def run_verification(
    names: Sequence[str],
    seed: int,
    options: Optional[SuiteOptions] = None,
    max_workers: int = 1,
) -> Dict:
    """
    Run suites concurrently and assemble the report.

    Returns:
        Dict with keys seed, passed and suites (in registry order)
    """
    selected = resolve_suites(names)
    options = options or SuiteOptions()
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as executor:
        futures = [executor.submit(run_suite, name, seed, options) for name in selected]
        results = [future.result() for future in futures]
    return {
        'seed': seed,
        'options': options.model_dump(),
        'passed': all(result.passed for result in results),
        'suites': [result.to_dict() for result in results],
    }

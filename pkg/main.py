"""
Command-line entry point.

    python main.py simulate     --config configs/sphere_two_to_one.yaml --out output/
    python main.py spectrum     --config configs/flat_isotropic.yaml
    python main.py eigensolve   --config configs/sphere_two_to_one.yaml
    python main.py degeneracies --config configs/hyperboloid.yaml
    python main.py verify       --suite all --seed 7

Exit codes: 0 success, 1 a requested check failed, 2 configuration error,
3 domain or precondition error, 4 numerical failure.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from config.run_config import RunConfig, VerifySection, load_run_config
from config.settings import Settings
from core import dynamics, qnumeric, qspectra
from core.exceptions import ConfigError, OscillatorError, QuantumNumberRangeError
from core.export_engine import ExportConfig, ExportEngine
from core.verification import run_verification

logger = logging.getLogger(__name__)

COMMANDS = ('simulate', 'spectrum', 'eigensolve', 'verify', 'degeneracies')

# intra-class relative spread accepted by `degeneracies`
DEGENERACY_TOLERANCE = 1e-12

# relative drift of H and Hxi accepted by `simulate`; X and Y drift secularly at
# practical steps and are only reported
SIMULATE_DRIFT_TOLERANCE = 1e-5
GATED_DRIFTS = ('H', 'Hxi')

# largest closed-form relative error accepted by `eigensolve`
EIGENSOLVE_TOLERANCE = 1e-2


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="YAML run config")
    common.add_argument("--seed", type=int, default=None, help="Seed of the randomized checks")
    common.add_argument("--out", type=Path, default=None, help="Output directory")
    common.add_argument("--workers", type=int, default=None, help="Thread pool size")
    common.add_argument("--log-level", default=None, help="Logging level (DEBUG, INFO, ...)")

    parser = argparse.ArgumentParser(description="Curved anisotropic oscillator toolkit")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("simulate", parents=[common], help="Integrate a trajectory")
    subparsers.add_parser("spectrum", parents=[common], help="Closed-form spectrum with degeneracy classes")
    subparsers.add_parser("eigensolve", parents=[common], help="Finite-difference eigensolve and comparison")
    verify = subparsers.add_parser("verify", parents=[common], help="Run invariant suites")
    verify.add_argument("--suite", action="append", default=None, help="Suite name or 'all' (repeatable)")
    subparsers.add_parser("degeneracies", parents=[common], help="Degeneracy classes and spreads")
    return parser


def _require_config(config: Optional[RunConfig], command: str) -> RunConfig:
    if config is None:
        raise ConfigError(f"{command} needs --config")
    return config


def cmd_simulate(config: RunConfig, engine: ExportEngine) -> int:
    """Integrate, export the trajectory and a drift/closure summary; fails on H or Hxi drift."""
    p = config.params
    cfg = config.integrator.build(p)
    traj = dynamics.integrate(p, config.initial_state, cfg)
    prefix = config.output.prefix
    engine.export_trajectory(traj, f"{prefix}trajectory")
    summary: Dict = {
        'params': p.model_dump(),
        'integrator': cfg.model_dump(mode='json'),
        'samples': len(traj),
        'drift': dynamics.drift_table(traj),
    }
    if config.closure.enabled:
        summary['closure_time'] = dynamics.closure_detect(traj, tol=config.closure.tol)
    engine.export_json(summary, f"{prefix}simulate_summary")
    worst = max((summary['drift'][name] for name in GATED_DRIFTS if name in summary['drift']), default=0.0)
    if worst > SIMULATE_DRIFT_TOLERANCE:
        logger.error("largest energy drift %.3e exceeds %g", worst, SIMULATE_DRIFT_TOLERANCE)
        return 1
    return 0


def cmd_spectrum(config: RunConfig, engine: ExportEngine) -> int:
    """Enumerate closed-form levels and export them as JSON."""
    spectrum = qspectra.enumerate_levels(
        config.params, config.spectrum.energy_cutoff, config.spectrum.max_key
    )
    engine.export_spectrum(spectrum, f"{config.output.prefix}spectrum")
    return 0


def cmd_degeneracies(config: RunConfig, engine: ExportEngine) -> int:
    """Export degeneracy classes; fails when a class spread exceeds the tolerance."""
    spectrum = qspectra.enumerate_levels(
        config.params, config.spectrum.energy_cutoff, config.spectrum.max_key
    )
    engine.export_degeneracies(spectrum, f"{config.output.prefix}degeneracies")
    worst = max((c.spread for c in spectrum.classes), default=0.0)
    if worst > DEGENERACY_TOLERANCE:
        logger.error("largest intra-class spread %.3e exceeds %g", worst, DEGENERACY_TOLERANCE)
        return 1
    return 0


def _comparison_row(config: RunConfig, mu: int, nu: int) -> Optional[Dict]:
    p = config.params
    try:
        closed = qspectra.level(p, mu, nu)
        fd = qnumeric.two_stage_level(
            p, mu, nu, config.grid.n_points, config.grid.scheme,
            richardson=config.grid.richardson, length=config.grid.length,
        )
    except QuantumNumberRangeError as e:
        logger.warning("skipping (%s, %s): %s", mu, nu, str(e))
        return None
    return {'mu': mu, 'nu': nu, 'fd_energy': fd, 'closed_form': closed, 'rel_error': abs(fd - closed) / abs(closed)}


def cmd_eigensolve(config: RunConfig, engine: ExportEngine, workers: int) -> int:
    """Solve both separated problems, export eigenpairs and the closed-form comparison.

    Fails when a finite-difference level misses its closed form by more than
    EIGENSOLVE_TOLERANCE.
    """
    p = config.params
    request = config.eigensolve
    grid = config.grid.build(p)
    prefix = config.output.prefix

    xi = qnumeric.solve_xi(p, grid, max(request.n_eigs, request.mu + 1))
    engine.export_eigen(xi, f"{prefix}xi")
    eps = qnumeric.epsilon_from_xi(xi, request.mu)
    y = qnumeric.solve_y(
        p, p.gamma * eps, grid, request.n_eigs, config.grid.scheme,
        shift=p.gamma ** 2 * float(xi.reduced[request.mu]),
    )
    engine.export_eigen(y, f"{prefix}y_mu{request.mu}")

    pairs = [(mu, nu) for mu in range(request.max_mu + 1) for nu in range(request.max_nu + 1)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = list(executor.map(lambda pair: _comparison_row(config, *pair), pairs))
    rows = [row for row in rows if row is not None]
    engine.export_comparison(rows, f"{prefix}comparison")
    worst = max((row['rel_error'] for row in rows), default=0.0)
    if worst > EIGENSOLVE_TOLERANCE:
        logger.error("largest closed-form relative error %.3e exceeds %g", worst, EIGENSOLVE_TOLERANCE)
        return 1
    return 0


def cmd_verify(
    config: Optional[RunConfig], engine: ExportEngine, suites: List[str], seed: int, workers: int
) -> int:
    """Run the suites and export the JSON report; exit 1 if any check failed."""
    section = config.verify if config is not None else VerifySection()
    prefix = config.output.prefix if config is not None else ""
    report = run_verification(suites, seed, section.options, workers)
    engine.export_json(report, f"{prefix}verify_report")
    for suite in report['suites']:
        logger.info("%-20s %s", suite['name'], "passed" if suite['passed'] else "FAILED")
    return 0 if report['passed'] else 1


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one command and return its exit code.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        int: 0 on success, 1 if a check failed, otherwise the error's exit code
    """
    args = build_parser().parse_args(argv)
    settings = Settings()
    level = (args.log_level or settings.effective_log_level).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=settings.log_format, force=True)

    try:
        config = load_run_config(args.config) if args.config is not None else None
        if config is not None:
            config.check_preconditions(args.command)

        seed = args.seed
        if seed is None:
            seed = config.seed if config is not None and config.seed is not None else settings.default_seed
        workers = args.workers or settings.max_workers
        if workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {workers}")
        out_dir = args.out
        if out_dir is None:
            out_dir = config.output.dir if config is not None and config.output.dir is not None else settings.output_dir
        engine = ExportEngine(out_dir, ExportConfig(float_format=settings.float_format))

        if args.command == 'simulate':
            return cmd_simulate(_require_config(config, 'simulate'), engine)
        if args.command == 'spectrum':
            return cmd_spectrum(_require_config(config, 'spectrum'), engine)
        if args.command == 'degeneracies':
            return cmd_degeneracies(_require_config(config, 'degeneracies'), engine)
        if args.command == 'eigensolve':
            return cmd_eigensolve(_require_config(config, 'eigensolve'), engine, workers)
        if args.command == 'verify':
            if args.suite:
                suites = args.suite
            elif config is not None:
                suites = config.verify.suites
            else:
                suites = settings.suites
            return cmd_verify(config, engine, suites, seed, workers)
        raise ConfigError(f"unknown command {args.command}; choose from {', '.join(COMMANDS)}")
    except OscillatorError as e:
        logger.error("%s: %s", type(e).__name__, str(e))
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

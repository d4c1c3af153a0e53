"""
Tests for the command-line interface and its exit codes.
"""
import json
from pathlib import Path

import pandas as pd
import pytest

import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def out_dir(tmp_path):
    """Directory receiving the artifacts of one invocation."""
    return tmp_path / "artifacts"


@pytest.fixture
def write_config(tmp_path):
    """Write a YAML run config and return its path as a string."""
    def _write(text: str, name: str = "run.yaml") -> str:
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return _write


def test_spectrum_flat_isotropic(out_dir):
    """Test the flat isotropic classes of sizes 1 to 4."""
    code = main.run(['spectrum', '--config', str(CONFIG_DIR / 'flat_isotropic.yaml'), '--out', str(out_dir)])
    assert code == 0
    payload = json.loads((out_dir / 'flat_spectrum.json').read_text(encoding='utf-8'))
    assert [c['size'] for c in payload['classes']] == [1, 2, 3, 4]
    assert [c['key'] for c in payload['classes']] == [0, 1, 2, 3]
    assert payload['empty_mu'] == []


def test_degeneracies_hyperboloid(out_dir):
    """Test the degeneracy table of the bound hyperboloid spectrum."""
    code = main.run(['degeneracies', '--config', str(CONFIG_DIR / 'hyperboloid.yaml'), '--out', str(out_dir)])
    assert code == 0
    frame = pd.read_csv(out_dir / 'hyperboloid_degeneracies.csv')
    assert frame['size'].sum() == 10
    assert frame['spread'].max() <= main.DEGENERACY_TOLERANCE


def test_degeneracies_spread_failure(out_dir, monkeypatch):
    """Test exit code 1 when a class spread exceeds the tolerance."""
    monkeypatch.setattr(main, 'DEGENERACY_TOLERANCE', -1.0)
    code = main.run(['degeneracies', '--config', str(CONFIG_DIR / 'hyperboloid.yaml'), '--out', str(out_dir)])
    assert code == 1


def test_simulate(out_dir, write_config):
    """Test the trajectory export and the summary."""
    config = write_config(
        "params: {kappa: 0.0, omega: 1.0, ratio: [1, 1]}\n"
        "integrator: {dt: 0.001, t_end: 7.0, record_every: 1}\n"
        "initial_state: {x: 1.0, y: 0.0, px: 0.0, py: 1.0}\n"
        "output: {prefix: circle_}\n"
    )
    assert main.run(['simulate', '--config', config, '--out', str(out_dir)]) == 0
    assert (out_dir / 'circle_trajectory.csv').exists()
    assert (out_dir / 'circle_trajectory_ambient.csv').exists()
    summary = json.loads((out_dir / 'circle_simulate_summary.json').read_text(encoding='utf-8'))
    assert set(summary['drift']) == {'H', 'Hxi', 'X', 'Y', 'J'}
    assert summary['closure_time'] == pytest.approx(6.283185307179586, abs=1e-6)
    assert summary['integrator']['method'] == 'implicit_midpoint'


def test_simulate_drift_failure(out_dir, write_config, monkeypatch):
    """Test exit code 1, with the artifacts still written, when the energy drift exceeds the tolerance."""
    monkeypatch.setattr(main, 'SIMULATE_DRIFT_TOLERANCE', -1.0)
    config = write_config(
        "params: {kappa: 0.0, omega: 1.0, ratio: [1, 1]}\n"
        "integrator: {dt: 0.01, t_end: 1.0}\n"
        "initial_state: {x: 1.0, y: 0.0, px: 0.0, py: 1.0}\n"
    )
    assert main.run(['simulate', '--config', config, '--out', str(out_dir)]) == 1
    assert (out_dir / 'simulate_summary.json').exists()


def test_eigensolve_hyperboloid(out_dir, write_config):
    """Test the eigenpair exports and the comparison over bound pairs."""
    config = write_config(
        "params: {kappa: -1.0, omega: 5.0}\n"
        "grid: {n_points: 400, length: 20.0}\n"
        "eigensolve: {mu: 0, n_eigs: 4, max_mu: 4, max_nu: 3}\n"
    )
    assert main.run(['eigensolve', '--config', config, '--out', str(out_dir), '--workers', '2']) == 0
    assert (out_dir / 'xi_vectors.csv').exists()
    values = json.loads((out_dir / 'y_mu0_values.json').read_text(encoding='utf-8'))
    assert values['axis'] == 'y'
    comparison = pd.read_csv(out_dir / 'comparison.csv')
    # nu_max = 3, 2, 1, 0 for mu = 0..3; mu = 4 carries no bound y-state
    assert len(comparison) == 10
    assert comparison['rel_error'].max() < 1e-2


def test_eigensolve_comparison_failure(out_dir, write_config, monkeypatch):
    """Test exit code 1 when a finite-difference level misses its closed form."""
    monkeypatch.setattr(main, 'EIGENSOLVE_TOLERANCE', -1.0)
    config = write_config(
        "params: {kappa: -1.0, omega: 5.0}\n"
        "grid: {n_points: 200, length: 20.0}\n"
        "eigensolve: {mu: 0, n_eigs: 2, max_mu: 1, max_nu: 1}\n"
    )
    assert main.run(['eigensolve', '--config', config, '--out', str(out_dir)]) == 1
    assert (out_dir / 'comparison.csv').exists()


def test_verify_is_deterministic(tmp_path):
    """Test that two runs with one seed write identical reports."""
    reports = []
    for name in ('first', 'second'):
        out = tmp_path / name
        code = main.run(['verify', '--suite', 'ktrig', '--suite', 'flat_limits', '--seed', '11', '--out', str(out)])
        assert code == 0
        reports.append((out / 'verify_report.json').read_bytes())
    assert reports[0] == reports[1]
    payload = json.loads(reports[0])
    assert payload['seed'] == 11
    assert [s['name'] for s in payload['suites']] == ['ktrig', 'flat_limits']


def test_verify_seed_from_config(out_dir):
    """Test that the config seed is used when --seed is absent."""
    config = str(CONFIG_DIR / 'verify.yaml')
    assert main.run(['verify', '--config', config, '--suite', 'ktrig', '--out', str(out_dir)]) == 0
    payload = json.loads((out_dir / 'verify_report.json').read_text(encoding='utf-8'))
    assert payload['seed'] == 7
    assert payload['passed'] is True


def test_unknown_suite_is_config_error(out_dir):
    """Test exit code 2 for an unknown suite."""
    assert main.run(['verify', '--suite', 'nope', '--out', str(out_dir)]) == 2


def test_missing_config(out_dir, tmp_path):
    """Test exit code 2 without a config or with an unreadable one."""
    assert main.run(['spectrum', '--out', str(out_dir)]) == 2
    assert main.run(['spectrum', '--config', str(tmp_path / 'nope.yaml'), '--out', str(out_dir)]) == 2


def test_spectrum_needs_cutoff_on_sphere(out_dir, write_config):
    """Test exit code 2 for an unbounded sphere enumeration."""
    config = write_config("params: {kappa: 1.0, omega: 1.0}\n")
    assert main.run(['spectrum', '--config', config, '--out', str(out_dir)]) == 2


def test_invalid_workers(out_dir):
    """Test that a negative pool size is refused."""
    assert main.run(['verify', '--suite', 'ktrig', '--workers', '-1', '--out', str(out_dir)]) == 2


def test_domain_error_exit_code(out_dir, write_config):
    """Test exit code 3 for an initial state outside the chart."""
    config = write_config(
        "params: {kappa: 1.0, omega: 1.0}\n"
        "initial_state: {x: 0.0, y: 2.0}\n"
    )
    assert main.run(['simulate', '--config', config, '--out', str(out_dir)]) == 3


def test_model_precondition_exit_code(out_dir, write_config):
    """Test exit code 3 for a sphere anisotropy below one half."""
    config = write_config("params: {kappa: 1.0, omega: 1.0, gamma: 0.3}\n")
    assert main.run(['spectrum', '--config', config, '--out', str(out_dir)]) == 3


def test_eigensolve_flat_is_domain_error(out_dir):
    """Test exit code 3 for eigensolve at kappa = 0."""
    code = main.run(['eigensolve', '--config', str(CONFIG_DIR / 'flat_isotropic.yaml'), '--out', str(out_dir)])
    assert code == 3


def test_numerical_error_exit_code(out_dir, write_config, capsys):
    """Test exit code 4 when the Newton iteration does not converge."""
    config = write_config(
        "params: {kappa: 1.0, omega: 1.0, ratio: [2, 1]}\n"
        "integrator: {dt: 0.1, t_end: 1.0, newton_tol: 1.0e-15, newton_max_iter: 1}\n"
        "initial_state: {x: 0.2, y: 0.3, px: 0.1, py: 0.0}\n"
    )
    assert main.run(['simulate', '--config', config, '--out', str(out_dir)]) == 4
    assert "error:" in capsys.readouterr().err


def test_missing_command():
    """Test that argparse rejects a missing subcommand."""
    with pytest.raises(SystemExit) as excinfo:
        main.run([])
    assert excinfo.value.code == 2

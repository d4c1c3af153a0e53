"""
Integration tests for the oscillator toolkit.

This module contains tests that verify the interaction between different components:
- Run configs driving integration, enumeration and eigensolves
- Classical conserved quantities read back from exported trajectories
- Closed-form spectra against the finite-difference solver
- Concurrent exports
"""

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from config.run_config import load_run_config, parse_run_config
from core import classical, dynamics, qnumeric, qspectra
from core.export_engine import ExportEngine
from core.params import ModelParams, PhasePoint

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def engine(tmp_path):
    """Export engine writing into a temporary directory."""
    return ExportEngine(tmp_path / "exports")


def test_config_to_trajectory_export(engine):
    """Test config, integration and export, then re-evaluate H on the exported states."""
    config = load_run_config(CONFIG_DIR / "sphere_two_to_one.yaml")
    config.check_preconditions('simulate')
    cfg = config.integrator.build(config.params).model_copy(update={'t_end': 2.0})
    traj = dynamics.integrate(config.params, config.initial_state, cfg)
    traj_path, ambient_path = engine.export_trajectory(traj, 'orbit')

    frame = pd.read_csv(traj_path)
    states = frame[['x', 'y', 'px', 'py']].to_numpy()
    recomputed = classical.hamiltonian(config.params, states)
    assert np.max(np.abs(recomputed - frame['H'].to_numpy())) < 1e-12
    assert np.max(np.abs(frame['H'] - frame['H'].iloc[0])) < 1e-6

    ambient = pd.read_csv(ambient_path)
    assert len(ambient) == len(frame)


def test_classical_and_quantum_degeneracy_agree():
    """Test that the 2:1 key groups closed-form and finite-difference levels alike."""
    p = ModelParams.from_ratio(1.0, 3.0, 2, 1)
    spectrum = qspectra.enumerate_levels(p, max_key=4)
    members = next(c.members for c in spectrum.classes if c.key == 2)
    assert members == [(0, 2), (1, 0)]
    fd = [qnumeric.two_stage_level(p, mu, nu, 2000) for mu, nu in members]
    assert fd[0] == pytest.approx(fd[1], rel=1e-4)
    assert fd[0] == pytest.approx(spectrum.classes[2].energy, rel=1e-4)


def test_hyperboloid_config_bound_spectrum(engine):
    """Test that the finite-difference levels of every bound pair match the closed form."""
    config = load_run_config(CONFIG_DIR / "hyperboloid.yaml")
    spectrum = qspectra.enumerate_levels(config.params)
    assert spectrum.empty_mu == [4]
    rows = []
    for entry in spectrum.entries:
        fd = qnumeric.two_stage_level(config.params, entry.mu, entry.nu, 2000, length=config.grid.length)
        rows.append({'mu': entry.mu, 'nu': entry.nu, 'fd_energy': fd, 'closed_form': entry.energy,
                     'rel_error': abs(fd - entry.energy) / abs(entry.energy)})
    frame = pd.read_csv(engine.export_comparison(rows))
    assert len(frame) == 10
    assert frame['rel_error'].max() < 1e-3
    assert (frame['closed_form'] < qspectra.continuum_threshold(config.params)).all()


def test_weak_curvature_spectrum_approaches_flat():
    """Test that the classes of a weakly curved sphere approach the flat ones."""
    flat = ModelParams.from_ratio(0.0, 1.0, 1, 1)
    curved = flat.with_kappa(1e-6)
    flat_classes = qspectra.enumerate_levels(flat, max_key=3).classes
    curved_classes = qspectra.enumerate_levels(curved, max_key=3).classes
    assert [c.members for c in curved_classes] == [c.members for c in flat_classes]
    for a, b in zip(curved_classes, flat_classes):
        assert a.energy == pytest.approx(b.energy, abs=1e-5)


def test_symmetry_logs_match_classical_module(sphere_two_to_one, sample_state):
    """Test that logged X and Y equal the classical symmetries at the sampled states."""
    traj = dynamics.integrate(sphere_two_to_one, sample_state, dynamics.IntegratorConfig(dt=1e-3, t_end=1.0))
    big_x, big_y = classical.real_symmetries(sphere_two_to_one, traj.states)
    assert np.allclose(traj.logs['X'], big_x, rtol=0.0, atol=1e-14)
    assert np.allclose(traj.logs['Y'], big_y, rtol=0.0, atol=1e-14)


def test_concurrent_exports(engine):
    """Test exporting several spectra from worker threads."""
    kappas = [1.0, 0.5, -0.5, -1.0]

    def job(kappa):
        p = ModelParams(kappa=kappa, omega=5.0, gamma=1.0, ratio=(1, 1))
        spectrum = qspectra.enumerate_levels(p, max_key=3)
        return engine.export_spectrum(spectrum, f"spectrum_{kappa:+.1f}")

    with ThreadPoolExecutor(max_workers=4) as executor:
        paths = list(executor.map(job, kappas))

    assert len(set(paths)) == 4
    for path in paths:
        payload = json.loads(path.read_text(encoding='utf-8'))
        assert payload['entries']
    assert len(engine.written()) == 4


def test_eigensolve_request_from_config():
    """Test the eigensolve section against the closed-form xi-levels."""
    config = parse_run_config({
        'params': {'kappa': 1.0, 'omega': 3.0},
        'grid': {'n_points': 2000},
        'eigensolve': {'mu': 1, 'n_eigs': 4},
    })
    config.check_preconditions('eigensolve')
    grid = config.grid.build(config.params)
    xi = qnumeric.solve_xi(config.params, grid, config.eigensolve.n_eigs)
    eps = qnumeric.epsilon_from_xi(xi, config.eigensolve.mu)
    assert eps == pytest.approx(qspectra.epsilon_mu(config.params, 1), rel=1e-4)


def test_flat_two_to_one_conservation(flat_params):
    """Test that a flat 2:1 trajectory keeps H and H_xi."""
    s0 = PhasePoint(x=0.5, y=-0.2, px=0.1, py=0.4)
    traj = dynamics.integrate(flat_params, s0, dynamics.IntegratorConfig(dt=1e-3, t_end=3.0, record_every=10))
    drifts = dynamics.drift_table(traj)
    assert drifts['H'] < 1e-6
    assert drifts['Hxi'] < 1e-6

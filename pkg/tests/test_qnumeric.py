"""
Test suite for the finite-difference eigensolver and the grid operator checks.
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from core import qnumeric, qspectra
from core.cache import CacheManager
from core.exceptions import (
    DomainError,
    EigensolveError,
    FlatCurvatureError,
    NotHyperbolicError,
    QuantumNumberRangeError,
)
from core.params import ModelParams
from core.qnumeric import EigenScheme, Grid1D


@pytest.fixture(scope="module")
def sphere_omega3():
    """Isotropic sphere oscillator with omega = 3 (fast near-wall convergence)."""
    return ModelParams(kappa=1.0, omega=3.0, gamma=1.0)


@pytest.fixture(scope="module")
def hyper_gamma2():
    """Hyperboloid oscillator with gamma = 2, omega = 5."""
    return ModelParams(kappa=-1.0, omega=5.0, gamma=2.0)


def test_grid_geometry():
    """Test spacing, interior points and exact refinement."""
    grid = Grid1D(a=-1.0, b=1.0, n_points=3)
    assert grid.h == pytest.approx(0.5)
    assert grid.points == pytest.approx([-0.5, 0.0, 0.5])
    fine = grid.refined()
    assert fine.n_points == 7
    assert fine.h == pytest.approx(grid.h / 2.0)


def test_grid_validation():
    """Test the grid bounds."""
    with pytest.raises(ValidationError):
        Grid1D(a=0.0, b=1.0, n_points=2)
    with pytest.raises(ValidationError):
        Grid1D(a=1.0, b=1.0, n_points=10)


def test_default_grids(sphere_params, hyperboloid_params):
    """Test the default intervals on the sphere and the hyperboloid."""
    grid = Grid1D.for_params(sphere_params, 100)
    assert (grid.a, grid.b) == pytest.approx((-math.pi / 2, math.pi / 2))
    grid = Grid1D.for_params(hyperboloid_params, 100)
    assert (grid.a, grid.b) == pytest.approx((-20.0, 20.0))
    grid = Grid1D.for_params(hyperboloid_params, 100, length=7.5)
    assert grid.b == 7.5
    # weak curvature is capped at 60 oscillator lengths
    weak = ModelParams(kappa=-1e-4, omega=1.0, gamma=1.0)
    assert Grid1D.for_params(weak, 100).b == pytest.approx(60.0)


def test_solvers_need_curvature(flat_params):
    """Test that kappa = 0 is refused."""
    grid = Grid1D(a=-5.0, b=5.0, n_points=50)
    with pytest.raises(FlatCurvatureError):
        qnumeric.solve_xi(flat_params, grid)
    with pytest.raises(FlatCurvatureError):
        qnumeric.two_stage_level(flat_params, 0, 0)


def test_grid_domain_checks(sphere_params, hyperboloid_params):
    """Test grids leaving the sphere interval or asymmetric hyperboloid grids."""
    with pytest.raises(DomainError):
        qnumeric.solve_xi(sphere_params, Grid1D(a=-2.0, b=2.0, n_points=50))
    with pytest.raises(DomainError):
        qnumeric.solve_xi(hyperboloid_params, Grid1D(a=-5.0, b=6.0, n_points=50))
    with pytest.raises(DomainError):
        qnumeric.solve_y(sphere_params, -1.0, Grid1D.for_params(sphere_params, 50))


def test_xi_levels_on_sphere(sphere_omega3):
    """Test the xi-eigenvalues against eps_mu^2 / (2 kappa)."""
    grid = Grid1D.for_params(sphere_omega3, 2000)
    xi = qnumeric.solve_xi(sphere_omega3, grid, 5)
    exact = np.array([qspectra.xi_level(sphere_omega3, mu) for mu in range(5)])
    assert np.max(np.abs(xi.eigenvalues - exact) / exact) < 1e-4
    assert xi.offset == pytest.approx(4.5)
    for mu in range(5):
        assert qnumeric.epsilon_from_xi(xi, mu) == pytest.approx(qspectra.epsilon_mu(sphere_omega3, mu), rel=1e-4)


@pytest.mark.slow
def test_xi_levels_unit_frequency_sphere():
    """Test the omega = 1 xi-levels with and without extrapolation."""
    p = ModelParams(kappa=1.0, omega=1.0, gamma=1.0)
    grid = Grid1D.for_params(p, 2000)
    xi = qnumeric.solve_xi(p, grid, 5)
    fine = qnumeric.solve_xi(p, grid.refined(), 5)
    exact = np.array([qspectra.xi_level(p, mu) for mu in range(5)])
    assert np.max(np.abs(xi.eigenvalues - exact) / exact) < 1e-4
    extrapolated = qnumeric.richardson_eigenvalues(xi, fine)
    assert np.max(np.abs(extrapolated - exact) / exact) < 1e-6


def test_eigenvectors_orthonormal(sphere_omega3):
    """Test the discrete L2 normalization and orthogonality."""
    grid = Grid1D.for_params(sphere_omega3, 500)
    xi = qnumeric.solve_xi(sphere_omega3, grid, 6)
    assert xi.gram() == pytest.approx(np.eye(6), abs=1e-10)
    assert xi.n_eigs == 6
    assert xi.eigenvectors.shape == (500, 6)


def test_node_counts(hyperboloid_params):
    """Test that the k-th eigenfunction has k nodes and a positive leading lobe."""
    grid = Grid1D.for_params(hyperboloid_params, 1000)
    xi = qnumeric.solve_xi(hyperboloid_params, grid, 4)
    for k in range(4):
        assert qnumeric.node_count(xi.eigenvectors[:, k]) == k
        column = xi.eigenvectors[:, k]
        first = column[np.nonzero(np.abs(column) > 1e-8 * np.max(np.abs(column)))[0][0]]
        assert first > 0.0


def test_y_levels_match_closed_form(hyperboloid_params):
    """Test the y-eigenvalues at the closed-form coupling against E(mu, nu)."""
    p = hyperboloid_params
    grid = Grid1D.for_params(p, 2000)
    g = p.gamma * qspectra.epsilon_mu(p, 0)
    y = qnumeric.solve_y(p, g, grid, 4, shift=p.gamma ** 2 * qspectra.xi_level_reduced(p, 0))
    for nu in range(3):
        assert y.eigenvalues[nu] == pytest.approx(qspectra.level(p, 0, nu), rel=1e-3)
    assert y.gauge is not None
    assert y.physical(0) == pytest.approx(y.eigenvectors[:, 0] / y.gauge)


def test_schemes_agree_after_extrapolation(hyperboloid_params):
    """Test that the symmetrized and direct discretizations share their limit."""
    p = hyperboloid_params
    grid = Grid1D.for_params(p, 1000)
    g = p.gamma * qspectra.epsilon_mu(p, 1)
    limits = {}
    for scheme in (EigenScheme.SYMMETRIC, EigenScheme.DIRECT):
        coarse = qnumeric.solve_y(p, g, grid, 3, scheme)
        fine = qnumeric.solve_y(p, g, grid.refined(), 3, scheme)
        limits[scheme] = qnumeric.richardson_eigenvalues(coarse, fine)
    assert limits[EigenScheme.SYMMETRIC] == pytest.approx(limits[EigenScheme.DIRECT], rel=1e-5)


def test_direct_scheme_needs_fine_grid():
    """Test that a grid with |kappa T| h / 2 >= 1 is refused by the direct scheme."""
    p = ModelParams(kappa=-1.0, omega=1.0, gamma=1.0)
    coarse = Grid1D(a=-20.0, b=20.0, n_points=9)
    with pytest.raises(EigensolveError, match="too coarse"):
        qnumeric.solve_y(p, 1.0, coarse, 3, EigenScheme.DIRECT)


def test_richardson_requires_same_problem(sphere_omega3):
    """Test that extrapolation refuses mismatched intervals."""
    a = qnumeric.solve_xi(sphere_omega3, Grid1D(a=-1.0, b=1.0, n_points=50), 2)
    b = qnumeric.solve_xi(sphere_omega3, Grid1D(a=-1.2, b=1.2, n_points=101), 2)
    with pytest.raises(ValueError):
        qnumeric.richardson_eigenvalues(a, b)


def test_xi_bound_count(hyperboloid_params):
    """Test that five xi-levels are bound at kappa = -1, omega = 5."""
    grid = Grid1D.for_params(hyperboloid_params, 4000, length=20.0)
    xi = qnumeric.solve_xi(hyperboloid_params, grid, 10)
    assert qnumeric.count_bound_states(xi) == 5


@pytest.mark.parametrize("mu,expected", [(0, 4), (1, 2), (2, 0)])
def test_y_bound_counts(hyper_gamma2, mu, expected):
    """Test the number of bound y-states for each mu at gamma = 2."""
    grid = Grid1D.for_params(hyper_gamma2, 2000, length=20.0)
    g = hyper_gamma2.gamma * qspectra.epsilon_mu(hyper_gamma2, mu)
    y = qnumeric.solve_y(hyper_gamma2, g, grid, 10)
    assert qnumeric.count_bound_states(y) == expected


def test_bound_count_needs_hyperboloid(sphere_omega3):
    """Test that bound-state counting is a hyperboloid operation."""
    xi = qnumeric.solve_xi(sphere_omega3, Grid1D.for_params(sphere_omega3, 100), 3)
    with pytest.raises(NotHyperbolicError):
        qnumeric.count_bound_states(xi)
    assert qnumeric.count_bound_states(xi, threshold=1e9) == 3


@pytest.mark.parametrize("mu,nu", [(0, 0), (1, 2), (3, 1)])
def test_two_stage_level_on_sphere(sphere_omega3, mu, nu):
    """Test the separated solve against the closed-form sphere levels."""
    exact = qspectra.level(sphere_omega3, mu, nu)
    assert qnumeric.two_stage_level(sphere_omega3, mu, nu, 2000) == pytest.approx(exact, rel=1e-4)
    assert qnumeric.two_stage_level(sphere_omega3, mu, nu, 2000, richardson=True) == pytest.approx(exact, rel=1e-6)


# gamma = 2 walls leave the xi-eigenfunctions barely smoother than C^1, which
# caps what one Richardson step gains
@pytest.mark.slow
@pytest.mark.timeout(300)
@pytest.mark.parametrize("gamma,extrapolated_tol", [(1.0, 1e-6), (1.5, 1e-6), (2.0, 1e-5)])
def test_two_stage_levels_unit_frequency_sphere(gamma, extrapolated_tol):
    """Test all levels with mu, nu <= 3 at omega = 1."""
    p = ModelParams(kappa=1.0, omega=1.0, gamma=gamma)
    for mu in range(4):
        for nu in range(4):
            exact = qspectra.level(p, mu, nu)
            assert qnumeric.two_stage_level(p, mu, nu, 2000) == pytest.approx(exact, rel=1e-4)
            extrapolated = qnumeric.two_stage_level(p, mu, nu, 2000, richardson=True)
            assert extrapolated == pytest.approx(exact, rel=extrapolated_tol)


def test_two_stage_level_anisotropic_sphere():
    """Test an anisotropic sphere level."""
    p = ModelParams(kappa=1.0, omega=3.0, gamma=1.5)
    assert qnumeric.two_stage_level(p, 1, 1, 2000) == pytest.approx(qspectra.level(p, 1, 1), rel=1e-4)


def test_two_stage_level_on_hyperboloid(hyperboloid_params):
    """Test the hyperboloid ground level."""
    exact = qspectra.level(hyperboloid_params, 0, 0)
    assert qnumeric.two_stage_level(hyperboloid_params, 0, 0, 2000, length=20.0) == pytest.approx(exact, rel=1e-4)


def test_two_stage_level_unbound(hyperboloid_params):
    """Test that unbound quantum numbers are rejected."""
    with pytest.raises(QuantumNumberRangeError):
        qnumeric.two_stage_level(hyperboloid_params, 6, 0, 500)


def test_two_stage_uses_cache(sphere_omega3):
    """Test that the xi-solve is memoized across calls."""
    cache = CacheManager()
    qnumeric.two_stage_level(sphere_omega3, 0, 0, 300, cache=cache)
    qnumeric.two_stage_level(sphere_omega3, 0, 1, 300, cache=cache)
    assert len(cache) == 1
    assert cache.hits == 1
    assert cache.misses == 1


def test_ladder_action(sphere_omega3):
    """Test that B+ maps Xi_0 onto Xi_1 and B- maps back, with second-order error."""
    grid = Grid1D.for_params(sphere_omega3, 1000)
    coarse = qnumeric.solve_xi(sphere_omega3, grid, 4)
    fine = qnumeric.solve_xi(sphere_omega3, grid.refined(), 4)
    for lowering in (False, True):
        check = qnumeric.ladder_action_check(sphere_omega3, fine, 0, lowering=lowering)
        assert (check.source, check.target) == ((1, 0) if lowering else (0, 1))
        assert check.sine < 1e-3
        assert 0.0 <= check.cosine_gap <= check.sine
        ratio = (qnumeric.ladder_action_residual(sphere_omega3, coarse, 0, lowering)
                 / qnumeric.ladder_action_residual(sphere_omega3, fine, 0, lowering))
        assert 3.7 < ratio < 4.3


def test_ladder_action_on_hyperboloid(hyperboloid_params):
    """Test raising along the finite hyperboloid ladder."""
    xi = qnumeric.solve_xi(hyperboloid_params, Grid1D.for_params(hyperboloid_params, 4000), 8)
    assert qnumeric.ladder_action_residual(hyperboloid_params, xi, 1) < 5e-3
    with pytest.raises(QuantumNumberRangeError):
        qnumeric.ladder_action_residual(hyperboloid_params, xi, 4)


def test_ladder_needs_xi_result(hyperboloid_params):
    """Test that the ladder check refuses a y-result."""
    grid = Grid1D.for_params(hyperboloid_params, 200)
    y = qnumeric.solve_y(hyperboloid_params, 4.0, grid, 3)
    with pytest.raises(DomainError):
        qnumeric.ladder_action_check(hyperboloid_params, y, 0)


def test_intertwining():
    """Test A- H(g) = H(g - hbar kappa) A- with second-order error."""
    p = ModelParams(kappa=1.0, omega=5.0, gamma=1.0)
    g = p.gamma * qspectra.epsilon_mu(p, 0)
    grid = Grid1D.for_params(p, 1000)
    coarse = qnumeric.intertwine_residual(p, g, grid)
    fine = qnumeric.intertwine_residual(p, g, grid.refined())
    assert fine < 1e-3
    assert 3.7 < coarse / fine < 4.3


def test_intertwining_needs_positive_couplings(sphere_params):
    """Test that g - hbar kappa must stay positive."""
    with pytest.raises(DomainError):
        qnumeric.intertwine_residual(sphere_params, 0.5, Grid1D.for_params(sphere_params, 100))


def test_composite_map_reaches_degenerate_level():
    """Test (A+)^2 B+ on the (0, 2) state of the 2:1 hyperboloid."""
    p = ModelParams.from_ratio(-1.0, 5.0, 2, 1)
    grid = Grid1D.for_params(p, 2000, length=20.0)
    quotient, target = qnumeric.composite_rayleigh_quotient(p, 0, 2, grid=grid)
    assert target == (1, 0)
    assert quotient == pytest.approx(qspectra.level(p, 1, 0), rel=1e-4)


def test_composite_map_preconditions(sphere_omega3):
    """Test the ratio and nu >= m requirements."""
    with pytest.raises(DomainError):
        qnumeric.composite_rayleigh_quotient(ModelParams(kappa=1.0, omega=3.0, gamma=math.sqrt(2.0)), 0, 2, 200)
    with pytest.raises(QuantumNumberRangeError):
        qnumeric.composite_rayleigh_quotient(ModelParams.from_ratio(1.0, 3.0, 2, 1), 0, 1, 200)

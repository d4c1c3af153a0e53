"""
Test suite for the coordinate systems and the ambient embedding.
"""
import math

import numpy as np
import pytest

from core.exceptions import DomainError, PoleError
from core.geometry import (
    AmbientPoint,
    ParallelCoords,
    PolarCoords,
    ambient_to_parallel,
    check_parallel_domain,
    embed,
    kinetic_energy,
    kinetic_energy_polar,
    metric_tensor,
    parallel_to_ambient,
    parallel_to_polar,
    polar_momenta,
    polar_to_ambient,
    polar_to_parallel,
)
from core.params import PhasePoint


@pytest.mark.parametrize("kappa", [-1.0, 0.0, 0.5, 1.0])
def test_embedding_satisfies_constraint(kappa):
    """Test that embedded points lie on the surface."""
    for x, y in [(0.0, 0.0), (0.4, -0.3), (-1.1, 0.9), (1.3, 0.2)]:
        amb = parallel_to_ambient(kappa, ParallelCoords(x=x, y=y))
        assert abs(amb.constraint_residual(kappa)) < 1e-12


def test_hyperboloid_upper_sheet():
    """Test that the hyperboloid embedding stays on the sheet x0 >= 1."""
    x0, _, _ = embed(-1.0, np.linspace(-3, 3, 13), np.linspace(-2, 2, 13))
    assert np.all(x0 >= 1.0)


def test_origin_maps_to_pole():
    """Test that (0, 0) is the ambient point (1, 0, 0)."""
    amb = parallel_to_ambient(1.0, ParallelCoords(x=0.0, y=0.0))
    assert amb.as_array() == pytest.approx([1.0, 0.0, 0.0])


@pytest.mark.parametrize("kappa", [-1.0, 0.0, 1.0])
def test_polar_axes(kappa):
    """Test that phi = 0 and phi = pi/2 follow the two base geodesics."""
    pc = polar_to_parallel(kappa, PolarCoords(r=0.7, phi=0.0))
    assert pc.x == pytest.approx(0.7, abs=1e-12)
    assert pc.y == pytest.approx(0.0, abs=1e-12)

    pc = polar_to_parallel(kappa, PolarCoords(r=0.7, phi=math.pi / 2))
    assert pc.x == pytest.approx(0.0, abs=1e-12)
    assert pc.y == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize("kappa", [-1.0, 0.0, 1.0])
def test_polar_round_trip(kappa):
    """Test parallel -> polar -> parallel over all quadrants."""
    for x, y in [(0.5, 0.2), (-0.5, 0.2), (-0.3, -0.6), (0.9, -0.1)]:
        pol = parallel_to_polar(kappa, ParallelCoords(x=x, y=y))
        assert 0.0 <= pol.phi < 2.0 * math.pi
        back = polar_to_parallel(kappa, pol)
        assert back.x == pytest.approx(x, abs=1e-12)
        assert back.y == pytest.approx(y, abs=1e-12)


@pytest.mark.parametrize("kappa", [1.0, 0.5, 0.0, -0.5, -1.0])
def test_polar_to_parallel_preserves_ambient_point(kappa, rng):
    """Test polar -> parallel on random points against the direct polar embedding."""
    r_max = 0.99 * math.pi / math.sqrt(kappa) if kappa > 0.0 else 2.5
    for r, phi in zip(rng.uniform(1e-3, r_max, 1000), rng.uniform(0.0, 2.0 * math.pi, 1000)):
        pol = PolarCoords(r=float(r), phi=float(phi))
        direct = polar_to_ambient(kappa, pol)
        via_parallel = parallel_to_ambient(kappa, polar_to_parallel(kappa, pol))
        for a, b in zip((direct.x0, direct.x1, direct.x2), (via_parallel.x0, via_parallel.x1, via_parallel.x2)):
            assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


def test_sphere_round_trip_near_antipode():
    """Test that x close to +-pi is recovered on the correct branch."""
    for x in (3.0, -3.0, math.pi):
        amb = parallel_to_ambient(1.0, ParallelCoords(x=x, y=0.4))
        back = ambient_to_parallel(1.0, amb)
        assert back.x == pytest.approx(x, abs=1e-12)
        assert back.y == pytest.approx(0.4, abs=1e-12)


def test_flat_polar_is_euclidean():
    """Test that kappa = 0 gives ordinary polar coordinates."""
    pol = parallel_to_polar(0.0, ParallelCoords(x=3.0, y=4.0))
    assert pol.r == pytest.approx(5.0)
    assert pol.phi == pytest.approx(math.atan2(4.0, 3.0))


def test_sphere_domain_checks():
    """Test the parallel and polar domain limits on the unit sphere."""
    with pytest.raises(DomainError):
        check_parallel_domain(1.0, ParallelCoords(x=math.pi + 0.1, y=0.0))
    with pytest.raises(DomainError):
        check_parallel_domain(1.0, ParallelCoords(x=0.0, y=math.pi / 2))
    with pytest.raises(DomainError):
        polar_to_ambient(1.0, PolarCoords(r=math.pi, phi=0.0))
    # no limits off the sphere
    check_parallel_domain(-1.0, ParallelCoords(x=50.0, y=20.0))


def test_polar_coords_validation():
    """Test r > 0 and phi in [0, 2 pi)."""
    with pytest.raises(ValueError):
        PolarCoords(r=0.0, phi=0.0)
    with pytest.raises(ValueError):
        PolarCoords(r=1.0, phi=2.0 * math.pi)
    with pytest.raises(ValueError):
        PolarCoords(r=1.0, phi=-0.1)


def test_polar_undefined_at_origin():
    """Test that the origin has no polar representation."""
    with pytest.raises(DomainError):
        parallel_to_polar(1.0, ParallelCoords(x=0.0, y=0.0))


def test_ambient_point_residual():
    """Test the constraint residual of an off-surface point."""
    amb = AmbientPoint(x0=1.0, x1=1.0, x2=0.0)
    assert amb.constraint_residual(1.0) == pytest.approx(1.0)
    assert amb.constraint_residual(0.0) == pytest.approx(0.0)


def test_metric_tensor():
    """Test ds^2 = C(y)^2 dx^2 + dy^2."""
    g = metric_tensor(1.0, ParallelCoords(x=0.3, y=math.pi / 3))
    assert g == pytest.approx(np.array([[0.25, 0.0], [0.0, 1.0]]))
    assert metric_tensor(0.0, ParallelCoords(x=5.0, y=5.0)) == pytest.approx(np.eye(2))


def test_kinetic_energy():
    """Test the free kinetic energy in parallel coordinates."""
    assert kinetic_energy(0.0, PhasePoint(x=1.0, y=2.0, px=3.0, py=4.0)) == pytest.approx(12.5)
    # px is divided by C(y)^2 = 1/4
    state = PhasePoint(x=0.0, y=math.pi / 3, px=1.0, py=0.0)
    assert kinetic_energy(1.0, state) == pytest.approx(2.0)


def test_kinetic_energy_wall():
    """Test the singularity at the y-wall of the sphere."""
    with pytest.raises(PoleError):
        kinetic_energy(1.0, PhasePoint(x=0.0, y=math.pi / 2, px=1.0, py=0.0))
    with pytest.raises(PoleError):
        kinetic_energy_polar(1.0, math.pi, 0.0, 1.0)


@pytest.mark.parametrize("kappa", [-1.0, 0.0, 1.0])
def test_kinetic_energy_is_chart_independent(kappa):
    """Test that the polar transform of the momenta preserves the kinetic energy."""
    state = PhasePoint(x=0.4, y=0.3, px=0.2, py=-0.5)
    r, phi, pr, pphi = polar_momenta(kappa, state)
    assert kinetic_energy_polar(kappa, r, pr, pphi) == pytest.approx(kinetic_energy(kappa, state), rel=1e-7)


def test_flat_polar_momenta():
    """Test pphi = x py - y px in the plane."""
    state = PhasePoint(x=1.0, y=2.0, px=0.5, py=-0.25)
    r, phi, pr, pphi = polar_momenta(0.0, state)
    assert r == pytest.approx(math.sqrt(5.0))
    assert pphi == pytest.approx(1.0 * -0.25 - 2.0 * 0.5, abs=1e-8)
    assert pr == pytest.approx((1.0 * 0.5 + 2.0 * -0.25) / math.sqrt(5.0), abs=1e-8)

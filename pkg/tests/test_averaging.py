import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.special import ellipk

from secular import averaging as av
from secular.elements import MassParams, OrbitGeometry
from secular.errors import CollisionError, ConvergenceError, DomainError


def coplanar_circles(r1, a2):
    """Mean of 1/|x1 - x2| over two coplanar concentric circles (complete elliptic K)."""
    m = 4 * r1 * a2 / (r1 + a2) ** 2
    return 2 * ellipk(m) / (math.pi * (r1 + a2))


def point(eps, Gamma2, Theta, gamma2, Lambda2=1.0, masses=None):
    masses = masses or MassParams.normalized()
    return av.ReducedSecularPoint(eps * masses.semi_major_axis(Lambda2), Lambda2, Theta,
                                  Gamma2, gamma2, masses)


def direct_average(p, nodes=4096):
    """Average over the mean anomaly on a uniform grid in ell (no zeta substitution)."""
    from secular.elements import anomalies, solve_kepler

    ell = 2 * np.pi * np.arange(nodes) / nodes
    zeta = np.array([solve_kepler(p.e2, x) for x in ell])
    nu, rho = anomalies(p.e2, zeta)
    a2 = p.a2
    d2 = p.r1**2 + 2 * p.r1 * a2 * rho * p.sin_incl * np.cos(p.gamma2 + nu) + (a2 * rho) ** 2
    return float(np.mean(1 / np.sqrt(d2)))


def test_outer_average_at_zero_radius():
    p = point(0.0, 0.7, 0.2, 1.0)
    assert av.outer_average(p) == pytest.approx(1.0 / p.a2, rel=1e-15)


def test_outer_average_circular_polar():
    p = point(0.3, 1.0, 1.0, 0.4)
    assert av.outer_average(p) == pytest.approx(1 / math.sqrt(p.r1**2 + p.a2**2), rel=1e-14)


def test_outer_average_against_mean_anomaly_grid():
    p = point(0.2, 0.8, 0.3, 0.7)
    assert av.outer_average(p) == pytest.approx(direct_average(p), rel=1e-12)


def test_outer_average_requires_nodes():
    with pytest.raises(DomainError):
        av.outer_average(point(0.1, 0.8, 0.3, 0.0), nodes=32)


def test_reduced_point_invariants():
    with pytest.raises(DomainError):
        point(1.2, 0.8, 0.3, 0.0)
    with pytest.raises(DomainError):
        point(0.1, 0.8, 0.9, 0.0)
    assert point(0.1, 0.8, 0.0, 0.0).sin_incl == 1.0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(0.3, 1.0), st.floats(-1.0, 1.0),
       st.floats(-math.pi, math.pi))
def test_outer_average_even_in_gamma(eps, g, th, gamma):
    assume(eps < 0.6 * (1 - math.sqrt(1 - g * g)))
    p = point(eps, g, th * g, gamma)
    assert av.outer_average(p) == pytest.approx(av.outer_average(p.with_(gamma2=-gamma)),
                                                rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.4), st.floats(0.5, 1.0), st.floats(-1.0, 1.0),
       st.floats(-math.pi, math.pi), st.floats(0.1, 10.0))
def test_outer_average_homogeneity(eps, g, th, gamma, s):
    assume(eps < 0.6 * (1 - math.sqrt(1 - g * g)))
    m = MassParams.normalized()
    p = point(eps, g, th * g, gamma, masses=m)
    # scaling frak_M by 1/s scales a2 by s at fixed Lambda2
    ms = MassParams.with_outer(1.0 / s)
    q = av.ReducedSecularPoint(s * p.r1, p.Lambda2, p.Theta, p.Gamma2, gamma, ms)
    assert q.a2 == pytest.approx(s * p.a2)
    assert av.outer_average(q) == pytest.approx(av.outer_average(p) / s, rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(0.0, 0.8), st.floats(-1.0, 1.0),
       st.floats(-math.pi, math.pi))
def test_quadrature_converges_spectrally(eps, e, th, gamma):
    # the integrand is analytic while the outer pericentre clears the inner radius
    assume(eps <= (1 - e) / 1.6)
    g = math.sqrt(1 - e * e)
    p = point(eps, g, th * g, gamma)
    assert abs(av.outer_average(p, 128) - av.outer_average(p, 256)) < 1e-12


def test_dual_average_examples():
    d = av.DualPoint(0.0, 1.0, 0.8, 0.7, 0.3)
    assert av.dual_average(d) == pytest.approx(1.0 / d.a2, rel=1e-15)


@pytest.mark.parametrize("iota", [0.0, 0.4, math.pi / 2, 2.5, math.pi])
def test_duality_map(iota):
    d = av.DualPoint(0.15, 1.0, 0.75, iota, 0.9)
    assert av.dual_average(d) == pytest.approx(av.outer_average(d.to_reduced()), abs=1e-12)


def test_dual_point_invariants():
    with pytest.raises(DomainError):
        av.DualPoint(0.1, 1.0, 1.2, 0.3, 0.0)
    with pytest.raises(DomainError):
        av.DualPoint(0.1, 1.0, 0.8, 4.0, 0.0)


def test_dual_average_collision():
    # the inner point sits exactly at perihelion (zeta = 0 is a node)
    e = 0.6
    d = av.DualPoint(1 - e, 1.0, math.sqrt(1 - e * e), math.pi / 2, math.pi)
    with pytest.raises(CollisionError):
        av.dual_average(d)


def test_mixed_average_examples():
    orbit = OrbitGeometry.from_elements(1.5, 0.3)
    N1 = av.direction_from_angles(0.4, 1.0)
    assert av.mixed_average(0.0, N1, orbit) == pytest.approx(1 / 1.5, rel=1e-15)
    circ = OrbitGeometry.from_elements(1.5, 0.0)
    r1 = 0.4
    # the outer orbit lies in the horizontal plane, so both circles are coplanar
    assert av.mixed_average(r1, [0, 0, 1], circ) == pytest.approx(
        coplanar_circles(r1, 1.5), rel=1e-13)


def test_mixed_average_precondition():
    orbit = OrbitGeometry.from_elements(1.0, 0.5)
    with pytest.raises(DomainError):
        av.mixed_average(0.6, [0, 0, 1], orbit)


def test_epsilon_project_examples():
    assert av.epsilon_project(av.PowerSeries((2, 5, 4))).coeffs == pytest.approx((2, 0, -2))
    assert av.epsilon_project(av.PowerSeries((0, 3, 0, 7))).coeffs == (0, 0, 0, 0)
    assert av.epsilon_project(av.PowerSeries((1,))).coeffs == (1,)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=12))
def test_epsilon_project_is_linear_projection_pattern(coeffs):
    s = av.PowerSeries(coeffs)
    p = av.epsilon_project(s)
    assert p.order == s.order
    assert all(p.coeffs[n] == 0 for n in range(1, len(coeffs), 2))
    assert av.epsilon_project(p).coeffs[0] == pytest.approx(coeffs[0])


def test_power_series_rejects_bad_input():
    with pytest.raises(DomainError):
        av.PowerSeries(())
    with pytest.raises(DomainError):
        av.PowerSeries((1.0, math.nan))


def test_bridge_examples():
    orbit = OrbitGeometry.from_elements(2.0, 0.4)
    N1 = av.direction_from_angles(1.0, 0.2)
    assert av.bridge_average(0.0, N1, orbit) == pytest.approx(0.5, rel=1e-15)
    circ = OrbitGeometry.from_elements(2.0, 0.0)
    r1 = 0.3
    assert av.bridge_average(r1, [0, 0, 1], circ, 30) == pytest.approx(
        coplanar_circles(r1, 2.0), rel=1e-13)


@pytest.mark.parametrize("seed", range(5))
def test_bridge_matches_mixed(seed):
    rng = np.random.default_rng(seed)
    orbit = OrbitGeometry.from_elements(1.0, rng.uniform(0, 0.6))
    N1 = av.direction_from_angles(rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi))
    g2 = rng.uniform(-math.pi, math.pi)
    assert av.bridge_average(0.1, N1, orbit, 20, g2=g2) == pytest.approx(
        av.mixed_average(0.1, N1, orbit, g2), abs=1e-8)


def test_bridge_convergence_errors():
    orbit = OrbitGeometry.from_elements(1.0, 0.5)
    with pytest.raises(ConvergenceError):
        av.bridge_average(0.6, [0, 0, 1], orbit)
    with pytest.raises(ConvergenceError) as info:
        av.bridge_average(0.4, [0, 0, 1], orbit, 5, tol=1e-12)
    assert info.value.residual > 1e-12


def test_phi1_average_examples():
    x2 = np.array([0.3, -1.1, 0.4])
    r2 = np.linalg.norm(x2)
    lhs, rhs, d = av.phi1_average_defect(0.5, x2, x2)
    assert lhs == pytest.approx(1 / math.sqrt(0.25 + r2 * r2), rel=1e-14)
    assert d < 1e-12
    N1 = np.cross(x2, [0.0, 0.0, 1.0])
    lhs, rhs, d = av.phi1_average_defect(0.5, N1, x2)
    q = 0.5 / r2
    from secular.legendre import delta, legendre_eval
    even = sum(q ** (2 * k) * delta(2 * k) * legendre_eval(2 * k, 0.0) for k in range(21)) / r2
    assert rhs == pytest.approx(even, rel=1e-14)
    assert d < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0, math.pi), st.floats(-math.pi, math.pi), st.floats(0, math.pi),
       st.floats(-math.pi, math.pi))
def test_phi1_average_random(pol1, az1, pol2, az2):
    x2 = 1.7 * av.direction_from_angles(pol2, az2)
    _, _, d = av.phi1_average_defect(0.2 * 1.7, av.direction_from_angles(pol1, az1), x2,
                                     order=40, tol=1e-10)
    assert d < 1e-10

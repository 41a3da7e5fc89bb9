import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secular import charts as ch
from secular.charts import CartesianPair, KPoint, PPoint
from secular.elements import MassParams
from secular.errors import DomainError, SingularChartError


def kpoints(seed, n, masses):
    rng = np.random.default_rng(seed)
    return [ch.random_kpoint(rng, masses) for _ in range(n)]


def ppoints(seed, n):
    rng = np.random.default_rng(seed)
    return [ch.random_ppoint(rng) for _ in range(n)]


@pytest.mark.parametrize("masses", [MassParams.normalized(), MassParams(1.0, 1e-3, 1e-3, 1.0)])
def test_k_roundtrip(masses):
    for p in kpoints(1, 100, masses):
        assert ch.point_distance(p, ch.k_inverse(ch.k_forward(p, masses), masses)) < 1e-10


def test_p_roundtrip():
    for p in ppoints(2, 100):
        assert ch.point_distance(p, ch.p_inverse(*ch.p_forward(p))) < 1e-10


@pytest.mark.parametrize("masses, tol", [(MassParams.normalized(), 1e-12),
                                         (MassParams(1.0, 1e-3, 1e-3, 1.0), 1e-10)])
def test_k_forward_defining_relations(masses, tol):
    # physical masses give a2 ~ 1e6, where cross products lose a few digits
    m = masses
    mm, MM = m.frak_m(2), m.frak_M(2)
    for p in kpoints(3, 50, m):
        c = ch.k_forward(p, m)
        C1, C2 = np.cross(c.x1, c.y1), np.cross(c.x2, c.y2)
        C = C1 + C2
        r1 = np.linalg.norm(c.x1)
        assert np.linalg.norm(C) == pytest.approx(p.G, rel=tol)
        assert C[2] == pytest.approx(p.Z, abs=tol * p.G)
        assert r1 == pytest.approx(p.r1, rel=tol)
        assert np.linalg.norm(C2) == pytest.approx(p.Gamma2, rel=tol)
        assert np.dot(C2, c.x1) / r1 == pytest.approx(p.Theta, abs=tol * p.Gamma2)
        assert np.dot(c.y1, c.x1) / r1 == pytest.approx(p.R1, abs=tol)
        energy = np.dot(c.y2, c.y2) / (2 * mm) - mm * MM / np.linalg.norm(c.x2)
        assert energy == pytest.approx(m.kepler_energy(p.Lambda2), rel=tol)


def test_planar_configuration(normalized):
    p = KPoint(Lambda2=1.0, Z=0.5, G=1.2, R1=0.1, Gamma2=0.8, Theta=0.0, ell2=0.4, z=0.3,
               g=-0.7, r1=0.2, gamma2=1.1, theta_node=math.pi)
    c = ch.k_forward(p, normalized)
    C1, C2 = np.cross(c.x1, c.y1), np.cross(c.x2, c.y2)
    C = C1 + C2
    for u, v in ((C1, C2), (C1, C), (C2, C)):
        assert np.linalg.norm(np.cross(u, v)) < 1e-12 * np.linalg.norm(u) * np.linalg.norm(v)
    # |C1|^2 reduces to (G - Gamma2)^2
    assert np.dot(C1, C1) == pytest.approx((p.G - p.Gamma2) ** 2, rel=1e-12)


def test_k_inverse_definitions(normalized):
    for p in kpoints(4, 30, normalized):
        c = ch.k_forward(p, normalized)
        q = ch.k_inverse(c, normalized)
        C2 = np.cross(c.x2, c.y2)
        assert q.Gamma2 == pytest.approx(np.linalg.norm(C2), rel=1e-13)
        assert q.Theta == pytest.approx(np.dot(C2, c.x1) / np.linalg.norm(c.x1), abs=1e-13)


def test_k_inverse_rejects_circular_orbit(normalized):
    p = kpoints(5, 1, normalized)[0]
    c = ch.k_forward(replace(p, Gamma2=p.Lambda2), normalized)
    with pytest.raises(SingularChartError):
        ch.k_inverse(c, normalized)


def test_k_inverse_rejects_unbound_orbit(normalized):
    c = CartesianPair(y1=np.array([0.0, 0.3, 0.0]), y2=np.array([0.0, 2.0, 0.1]),
                      x1=np.array([0.2, 0.0, 0.0]), x2=np.array([1.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        ch.k_inverse(c, normalized)


def test_inner_angular_momentum_formula(normalized):
    for p in kpoints(6, 50, normalized):
        c = ch.k_forward(p, normalized)
        C1 = np.cross(c.x1, c.y1)
        assert ch.inner_angular_momentum_sq(p) == pytest.approx(np.dot(C1, C1), rel=1e-11,
                                                                abs=1e-11)


def test_p_chart_relations():
    for p in ppoints(7, 50):
        y0, x0, y, x = ch.p_forward(p)
        assert np.linalg.norm(np.cross(x, y)) == pytest.approx(p.Phi, rel=1e-12)
        s = math.sqrt(1 - (p.Theta / p.Phi) ** 2)
        assert np.dot(x, x0) == pytest.approx(-p.r0 * p.r * s * math.cos(p.phi), abs=1e-12)
        Ctot = np.cross(x0, y0) + np.cross(x, y)
        assert np.linalg.norm(Ctot) == pytest.approx(p.G, rel=1e-12)
        assert Ctot[2] == pytest.approx(p.Z, abs=1e-12)


def test_liouville_relations():
    for p in ppoints(8, 50):
        try:
            lp = ch.liouville_from_p(p)
        except SingularChartError:
            continue
        assert lp.lam > 1 and abs(lp.mu) < 1
        assert ch.liouville_radius(lp) == pytest.approx(p.r, rel=1e-12)
        R, Phi2 = ch.liouville_R_Phi2(lp)
        y0, x0, y, x = ch.p_forward(p)
        C = np.cross(x, y)
        assert Phi2 == pytest.approx(np.dot(C, C), rel=1e-10)
        assert R == pytest.approx(p.R, abs=1e-11)


def test_liouville_midplane_has_zero_mu():
    # phi = pi/2 puts x orthogonal to x0, equidistant from both centres
    p = PPoint(Z=0.1, G=1.5, R0=0.2, R=0.3, Phi=1.0, Theta=0.4, z=0.1, g=0.2, r0=0.7,
               r=1.3, phi=0.5 * math.pi, theta_node=0.3)
    assert ch.liouville_from_p(p).mu == pytest.approx(0.0, abs=1e-15)


def test_symplectic_defects(normalized):
    for p in kpoints(9, 10, normalized):
        assert ch.symplectic_defect("K", p, 1e-5, normalized) < 1e-5
    for p in ppoints(10, 10):
        assert ch.symplectic_defect("P", p, 1e-5) < 1e-5


def test_symplectic_identity_chart():
    assert ch.symplectic_defect("identity") < 1e-12


def test_k_chart_canonical_for_other_masses():
    m = MassParams.with_outer(0.5)
    for p in kpoints(11, 5, m):
        assert ch.symplectic_defect("K", p, 1e-5, m) < 1e-5


def test_symplectic_guard():
    p = PPoint(Z=0.1, G=1.0, R0=0.2, R=0.3, Phi=1.0, Theta=0.99999, z=0.1, g=0.2, r0=0.7,
               r=1.3, phi=0.4, theta_node=0.3)
    with pytest.raises(SingularChartError):
        ch.symplectic_defect("P", p, 1e-5)
    with pytest.raises(DomainError):
        ch.symplectic_defect("P", ppoints(12, 1)[0], 1e-3)


def test_node_degeneracy_raises():
    # y parallel to x: C = 0 and the node axis x C vanishes
    y0 = np.array([0.0, 1.0, 0.0])
    x0 = np.array([1.0, 0.0, 0.0])
    x = np.array([0.0, 0.0, 1.0])
    y = np.array([0.0, 0.0, 0.5])
    with pytest.raises(SingularChartError):
        ch.p_inverse(y0, x0, y, x)


@settings(max_examples=100, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(0.1, 5.0))
def test_oriented_angle(theta, scale):
    u = np.array([1.0, 0.0, 0.0])
    v = scale * np.array([math.cos(theta), math.sin(theta), 0.0])
    w = np.array([0.0, 0.0, 2.0])
    got = ch.oriented_angle(w, u, v)
    assert abs(math.remainder(got - theta, 2 * math.pi)) < 1e-12
    assert abs(math.remainder(ch.oriented_angle(-w, u, v) + theta, 2 * math.pi)) < 1e-12

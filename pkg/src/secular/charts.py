"""Canonical coordinate charts.

Three charts are implemented:

* the outer Kepler chart ``K``: Delaunay-type action-angle pair for the
  outer body, radial pair for the inner body, and a regular reduction of
  the total angular momentum;
* the two-centre chart ``P``: the same angular-momentum reduction for a
  particle moving around a fixed axis ``x0``;
* the Liouville (elliptic) coordinates (lambda, mu) of the two-centre problem.

Angles are oriented with the right-hand rule: ``oriented_angle(w, u, v)``
is the angle from ``u`` to ``v`` seen from the tip of ``w``.

Conventions fixed here (all other modules rely on them):

* the inner-body angle of ``P`` is measured so that
  ``x0 . x = -r0 r sqrt(1 - Theta^2/Phi^2) cos(phi)``;
* in ``K`` the outer perihelion argument ``gamma2`` is measured from the
  node ``x1 x C2`` to the node-to-perihelion direction ``C2 x P2``, so that
  ``x1 . P2 = -r1 sqrt(1 - Theta^2/Gamma2^2) cos(gamma2)``.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .elements import (
    MassParams,
    anomalies,
    eccentric_from_true,
    rot1,
    rot3,
    solve_kepler,
    wrap_angle,
)
from .errors import DomainError, SingularChartError

NODE_TOL = 1e-10
E1 = np.array([1.0, 0.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def oriented_angle(w, u, v):
    """Angle from ``u`` to ``v`` in the plane orthogonal to ``w``, in (-pi, pi]."""
    w = np.asarray(w, dtype=float)
    s = np.dot(w, np.cross(u, v)) / np.linalg.norm(w)
    return wrap_angle(math.atan2(s, float(np.dot(u, v))))


def _check_node(vec, scale, name):
    n = float(np.linalg.norm(vec))
    if n < NODE_TOL * max(scale, 1e-300):
        raise SingularChartError(f"node {name} vanishes (|{name}| = {n:.3e})")
    return n


def _clip_cos(c):
    if abs(c) > 1.0 + 1e-12:
        raise DomainError(f"cosine {c!r} outside [-1, 1]")
    return min(1.0, max(-1.0, c))


# ---------------------------------------------------------------------------
# Data types


@dataclass(frozen=True)
class KPoint:
    """Point of the outer Kepler chart.

    Momenta ``(Lambda2, Z, G, R1, Gamma2, Theta)`` are conjugate to the
    coordinates ``(ell2, z, g, r1, gamma2, theta_node)`` in this order.
    """

    Lambda2: float
    Z: float
    G: float
    R1: float
    Gamma2: float
    Theta: float
    ell2: float
    z: float
    g: float
    r1: float
    gamma2: float
    theta_node: float

    def __post_init__(self):
        if self.Lambda2 <= 0:
            raise DomainError("Lambda2 must be positive")
        if not abs(self.Theta) < self.Gamma2 <= self.Lambda2 * (1 + 1e-14):
            raise DomainError("need |Theta| < Gamma2 <= Lambda2")
        if self.G <= 0 or abs(self.Z) > self.G * (1 + 1e-14):
            raise DomainError("need G > 0 and |Z| <= G")
        if abs(self.Theta) > self.G * (1 + 1e-14):
            raise DomainError("need |Theta| <= G")
        if self.r1 <= 0:
            raise DomainError("r1 must be positive")

    def to_array(self):
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, arr):
        return cls(*map(float, arr))


@dataclass(frozen=True)
class CartesianPair:
    """Heliocentric impulses and positions of the two planets."""

    y1: np.ndarray
    y2: np.ndarray
    x1: np.ndarray
    x2: np.ndarray

    def to_array(self):
        return np.concatenate([self.y1, self.y2, self.x1, self.x2])

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0:3], arr[3:6], arr[6:9], arr[9:12])


@dataclass(frozen=True)
class PPoint:
    """Point of the two-centre chart.

    Momenta ``(Z, G, R0, R, Phi, Theta)`` are conjugate to
    ``(z, g, r0, r, phi, theta_node)``.
    """

    Z: float
    G: float
    R0: float
    R: float
    Phi: float
    Theta: float
    z: float
    g: float
    r0: float
    r: float
    phi: float
    theta_node: float

    def __post_init__(self):
        if self.G <= 0 or abs(self.Z) > self.G * (1 + 1e-14):
            raise DomainError("need G > 0 and |Z| <= G")
        if not self.Phi > abs(self.Theta):
            raise DomainError("need Phi > |Theta|")
        if abs(self.Theta) > self.G * (1 + 1e-14):
            raise DomainError("need |Theta| <= G")
        if self.r0 <= 0 or self.r <= 0:
            raise DomainError("r0 and r must be positive")

    def to_array(self):
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, arr):
        return cls(*map(float, arr))


@dataclass(frozen=True)
class LiouvillePoint:
    p_lambda: float
    lam: float
    p_mu: float
    mu: float
    Theta: float
    r0: float


# ---------------------------------------------------------------------------
# Shared angular-momentum reduction


def _frames(Z, G, Theta, Phi, z, g, theta_node):
    """Rotation chain of the reduction: returns (M1, M, Ctot) where
    M1 = R3(z)R1(i)R3(g)R1(i1), M = M1 R3(theta)R1(i2)."""
    i = math.acos(_clip_cos(Z / G))
    i1 = math.acos(_clip_cos(Theta / G))
    i2 = math.acos(_clip_cos(Theta / Phi))
    Mzi = rot3(z) @ rot1(i)
    M1 = Mzi @ rot3(g) @ rot1(i1)
    M = M1 @ rot3(theta_node) @ rot1(i2)
    return M1, M, Mzi @ np.array([0.0, 0.0, G])


def _axis_leg(M1, M, Ctot, r0, R0, Phi):
    """Position/momentum along the reduction axis and the inner angular momentum."""
    x0 = M1 @ np.array([0.0, 0.0, r0])
    C = M @ np.array([0.0, 0.0, Phi])
    C0 = Ctot - C
    y0 = (R0 / r0) * x0 + np.cross(C0, x0) / r0**2
    return y0, x0, C


def _planar_leg(M, r, R, Phi, psi):
    c, s = math.cos(psi), math.sin(psi)
    x = M @ np.array([r * c, r * s, 0.0])
    y = M @ np.array([R * c - Phi / r * s, R * s + Phi / r * c, 0.0])
    return y, x


def _reduction_angles(Ctot, axis, C, scale):
    """Angles (z, g, theta_node) and the node nu2 of the reduction."""
    nu0 = np.cross(E3, Ctot)
    nu1 = np.cross(Ctot, axis)
    nu2 = np.cross(axis, C)
    _check_node(nu0, np.linalg.norm(Ctot), "nu0")
    _check_node(nu1, np.linalg.norm(Ctot) * np.linalg.norm(axis), "nu1")
    _check_node(nu2, np.linalg.norm(C) * np.linalg.norm(axis), "nu2")
    z = oriented_angle(E3, E1, nu0)
    g = oriented_angle(Ctot, nu0, nu1)
    th = oriented_angle(axis, nu1, nu2)
    return z, g, th, nu2


# ---------------------------------------------------------------------------
# Two-centre chart


def p_forward(p: PPoint):
    """Map a ``PPoint`` to Cartesian ``(y0, x0, y, x)``."""
    M1, M, Ctot = _frames(p.Z, p.G, p.Theta, p.Phi, p.z, p.g, p.theta_node)
    y0, x0, _ = _axis_leg(M1, M, Ctot, p.r0, p.R0, p.Phi)
    y, x = _planar_leg(M, p.r, p.R, p.Phi, p.phi - 0.5 * math.pi)
    return y0, x0, y, x


def p_inverse(y0, x0, y, x):
    """Recover the ``PPoint`` of a Cartesian two-centre configuration."""
    y0, x0, y, x = (np.asarray(v, dtype=float) for v in (y0, x0, y, x))
    C = np.cross(x, y)
    Ctot = np.cross(x0, y0) + C
    r0 = float(np.linalg.norm(x0))
    r = float(np.linalg.norm(x))
    if r0 == 0 or r == 0:
        raise SingularChartError("x0 and x must be nonzero")
    z, g, th, nu2 = _reduction_angles(Ctot, x0, C, 1.0)
    phi = oriented_angle(C, nu2, np.cross(C, x))
    return PPoint(
        Z=float(Ctot[2]),
        G=float(np.linalg.norm(Ctot)),
        R0=float(np.dot(y0, x0)) / r0,
        R=float(np.dot(y, x)) / r,
        Phi=float(np.linalg.norm(C)),
        Theta=float(np.dot(C, x0)) / r0,
        z=z, g=g, r0=r0, r=r, phi=phi, theta_node=th,
    )


# ---------------------------------------------------------------------------
# Outer Kepler chart


def _kepler_leg(Lambda2, Gamma2, ell2, m: MassParams):
    """Radius, radial impulse and true anomaly of the outer body."""
    a = m.semi_major_axis(Lambda2, 2)
    e = math.sqrt(max(0.0, 1.0 - (Gamma2 / Lambda2) ** 2))
    zeta = solve_kepler(e, ell2)
    nu, rho = anomalies(e, zeta)
    r2 = a * rho
    R2 = (Lambda2 / a) * e * math.sin(zeta) / rho
    return r2, R2, nu


def k_forward(p: KPoint, m: MassParams) -> CartesianPair:
    """Cartesian heliocentric pair of a point of the outer Kepler chart."""
    M1, M, C = _frames(p.Z, p.G, p.Theta, p.Gamma2, p.z, p.g, p.theta_node)
    y1, x1, _ = _axis_leg(M1, M, C, p.r1, p.R1, p.Gamma2)
    r2, R2, nu = _kepler_leg(p.Lambda2, p.Gamma2, p.ell2, m)
    y2, x2 = _planar_leg(M, r2, R2, p.Gamma2, p.gamma2 + nu - 0.5 * math.pi)
    return CartesianPair(y1=y1, y2=y2, x1=x1, x2=x2)


def lenz_vector(y, x, frak_M, frak_m):
    """Lenz vector ``y x C - frak_M frak_m^2 x/|x|`` (points to perihelion)."""
    C = np.cross(x, y)
    return np.cross(y, C) - frak_M * frak_m**2 * x / np.linalg.norm(x)


def k_inverse(c: CartesianPair, m: MassParams) -> KPoint:
    """Coordinates of the outer Kepler chart of a Cartesian pair."""
    y1, y2, x1, x2 = (np.asarray(v, dtype=float) for v in (c.y1, c.y2, c.x1, c.x2))
    mm, MM = m.frak_m(2), m.frak_M(2)
    r2 = float(np.linalg.norm(x2))
    energy = float(np.dot(y2, y2)) / (2 * mm) - mm * MM / r2
    if energy >= 0:
        raise DomainError("outer two-body energy must be negative")
    Lambda2 = math.sqrt(mm**3 * MM**2 / (-2.0 * energy))
    C1 = np.cross(x1, y1)
    C2 = np.cross(x2, y2)
    C = C1 + C2
    r1 = float(np.linalg.norm(x1))
    Gamma2 = float(np.linalg.norm(C2))
    z, g, th, nu2 = _reduction_angles(C, x1, C2, 1.0)
    L = lenz_vector(y2, x2, MM, mm)
    e = float(np.linalg.norm(L)) / (MM * mm**2)
    if e < 1e-12:
        raise SingularChartError("circular outer orbit: perihelion undefined")
    gamma2 = oriented_angle(C2, nu2, np.cross(C2, L))
    nu = oriented_angle(C2, L, x2)
    zeta = eccentric_from_true(e, nu)
    ell2 = zeta - e * math.sin(zeta)
    return KPoint(
        Lambda2=Lambda2,
        Z=float(C[2]),
        G=float(np.linalg.norm(C)),
        R1=float(np.dot(y1, x1)) / r1,
        Gamma2=Gamma2,
        Theta=float(np.dot(C2, x1)) / r1,
        ell2=ell2, z=z, g=g, r1=r1, gamma2=gamma2, theta_node=th,
    )


def inner_angular_momentum_sq(p: KPoint):
    """|C1|^2 expressed in chart coordinates."""
    G, Gam, Th = p.G, p.Gamma2, p.Theta
    return (G * G + Gam * Gam - 2 * Th * Th
            + 2 * math.sqrt(G * G - Th * Th) * math.sqrt(Gam * Gam - Th * Th)
            * math.cos(p.theta_node))


# ---------------------------------------------------------------------------
# Liouville coordinates


def liouville_from_p(p: PPoint) -> LiouvillePoint:
    """Elliptic coordinates (lambda, mu) and their conjugate momenta."""
    s = math.sqrt(1.0 - (p.Theta / p.Phi) ** 2)
    r0, r = p.r0, p.r
    cp = math.cos(p.phi)
    r_plus = math.sqrt(r0 * r0 - 2 * r0 * r * s * cp + r * r)
    r_minus = math.sqrt(r0 * r0 + 2 * r0 * r * s * cp + r * r)
    lam = (r_plus + r_minus) / (2 * r0)
    mu = (r_plus - r_minus) / (2 * r0)
    if lam <= 1.0 or abs(mu) >= 1.0:
        raise SingularChartError("degenerate elliptic coordinates (particle on the axis)")
    q = lam * lam + mu * mu - 1.0
    disc = (1 - mu * mu) * (lam * lam - 1) * p.Phi**2 - q * p.Theta**2
    root = math.copysign(math.sqrt(max(disc, 0.0)), math.sin(p.phi))
    p_lam = r0 * lam * p.R / math.sqrt(q) - mu * root / (q * (lam * lam - 1))
    p_mu = r0 * mu * p.R / math.sqrt(q) + lam * root / (q * (1 - mu * mu))
    return LiouvillePoint(p_lambda=p_lam, lam=lam, p_mu=p_mu, mu=mu,
                          Theta=p.Theta, r0=r0)


def liouville_radius(lp: LiouvillePoint):
    return lp.r0 * math.sqrt(lp.lam**2 + lp.mu**2 - 1.0)


def liouville_R_Phi2(lp: LiouvillePoint):
    """Inverse relations giving the radial impulse R and Phi^2.

    Solving the momentum formulas gives
    ``lam p_mu - mu p_lam = sqrt(...) (lam^2 - mu^2)/((1-mu^2)(lam^2-1))``,
    so the first term of Phi^2 carries ``(lam^2 - mu^2)^2`` in the denominator.
    """
    lam, mu, pl, pm = lp.lam, lp.mu, lp.p_lambda, lp.p_mu
    q = lam * lam + mu * mu - 1.0
    d = lam * lam - mu * mu
    R = (lam * (lam * lam - 1) * pl + mu * (1 - mu * mu) * pm) / (lp.r0 * d * math.sqrt(q))
    Phi2 = ((lam * pm - mu * pl) ** 2 * (lam * lam - 1) * (1 - mu * mu) / d**2
            + q / ((1 - mu * mu) * (lam * lam - 1)) * lp.Theta**2)
    return R, Phi2


# ---------------------------------------------------------------------------
# Canonicity check


_K_MOMENTA = ("Lambda2", "Z", "G", "R1", "Gamma2", "Theta")
_K_COORDS = ("ell2", "z", "g", "r1", "gamma2", "theta_node")
_P_MOMENTA = ("Z", "G", "R0", "R", "Phi", "Theta")
_P_COORDS = ("z", "g", "r0", "r", "phi", "theta_node")


def _omega(n):
    O = np.zeros((2 * n, 2 * n))
    O[:n, n:] = np.eye(n)
    O[n:, :n] = -np.eye(n)
    return O


def _ordered(point, names):
    return np.array([getattr(point, k) for k in names], dtype=float)


def symplectic_defect(chart, point=None, h_fd=1e-5, masses=None):
    """Max-norm of ``J^T Omega J - Omega`` for the forward map of a chart.

    ``J`` comes from the fourth-order central difference stencil, so the
    truncation error stays small near perihelion of eccentric orbits.

    Parameters
    ----------
    chart : {"K", "P", "identity"}
    point : KPoint, PPoint or array
        Base point (array of length 12 for the identity chart).
    h_fd : float
        Central-difference step, in [1e-7, 1e-4].
    masses : MassParams, optional
        Needed by the ``K`` chart.
    """
    if not 1e-7 <= h_fd <= 1e-4:
        raise DomainError("h_fd must lie in [1e-7, 1e-4]")
    if chart == "identity":
        base = np.zeros(12) if point is None else np.asarray(point, dtype=float)

        def fwd(v):
            return v

        n = base.size // 2
    elif chart in ("K", "P"):
        if chart == "K":
            masses = masses or MassParams.normalized()
            mom, crd = _K_MOMENTA, _K_COORDS

            def fwd(v):
                kp = KPoint(**dict(zip(mom + crd, v)))
                return k_forward(kp, masses).to_array()
        else:
            mom, crd = _P_MOMENTA, _P_COORDS

            def fwd(v):
                y0, x0, y, x = p_forward(PPoint(**dict(zip(mom + crd, v))))
                return np.concatenate([y0, y, x0, x])
        base = np.concatenate([_ordered(point, mom), _ordered(point, crd)])
        _guard_singularity(chart, point, h_fd)
        n = 6
    else:
        raise DomainError(f"unknown chart {chart!r}")

    J = np.empty((base.size, base.size))
    for k in range(base.size):
        step = np.zeros_like(base)
        step[k] = h_fd
        J[:, k] = (8 * (fwd(base + step) - fwd(base - step))
                   - (fwd(base + 2 * step) - fwd(base - 2 * step))) / (12 * h_fd)
    O = _omega(n)
    return float(np.max(np.abs(J.T @ O @ J - O)))


def _guard_singularity(chart, point, h_fd):
    """Reject points whose inclinations or nodes are within 10 h of degenerate."""
    margin = 10 * h_fd
    if chart == "K":
        G, Z, Th, Phi, rad = point.G, point.Z, point.Theta, point.Gamma2, point.r1
    else:
        G, Z, Th, Phi, rad = point.G, point.Z, point.Theta, point.Phi, point.r
    if G - abs(Z) < margin or G - abs(Th) < margin or Phi - abs(Th) < margin or rad < margin:
        raise SingularChartError("point too close to a chart singularity")


def random_kpoint(rng, masses=None, eps_max=0.5):
    """Random interior point of the outer Kepler chart (inner radius < a2)."""
    masses = masses or MassParams.normalized()
    Lambda2 = rng.uniform(0.8, 1.5)
    a2 = masses.semi_major_axis(Lambda2)
    Gamma2 = Lambda2 * rng.uniform(0.3, 0.95)
    Theta = Gamma2 * rng.uniform(-0.9, 0.9)
    G = max(abs(Theta), Gamma2) * rng.uniform(1.1, 2.0)
    Z = G * rng.uniform(-0.9, 0.9)
    return KPoint(
        Lambda2=Lambda2, Z=Z, G=G, R1=rng.uniform(-0.5, 0.5),
        Gamma2=Gamma2, Theta=Theta,
        ell2=rng.uniform(-math.pi, math.pi), z=rng.uniform(-math.pi, math.pi),
        g=rng.uniform(-math.pi, math.pi), r1=a2 * rng.uniform(0.05, eps_max),
        gamma2=rng.uniform(-math.pi, math.pi),
        theta_node=rng.uniform(-math.pi, math.pi),
    )


def random_ppoint(rng):
    """Random interior point of the two-centre chart."""
    Phi = rng.uniform(0.5, 1.5)
    Theta = Phi * rng.uniform(-0.9, 0.9)
    G = rng.uniform(max(abs(Theta), 0.2) * 1.1, 3.0)
    Z = G * rng.uniform(-0.9, 0.9)
    return PPoint(
        Z=Z, G=G, R0=rng.uniform(-1, 1), R=rng.uniform(-1, 1), Phi=Phi, Theta=Theta,
        z=rng.uniform(-math.pi, math.pi), g=rng.uniform(-math.pi, math.pi),
        r0=rng.uniform(0.5, 2.0), r=rng.uniform(0.5, 3.0),
        phi=rng.uniform(-math.pi, math.pi), theta_node=rng.uniform(-math.pi, math.pi),
    )


def point_distance(p, q):
    """Max coordinate-wise distance, angles compared modulo 2 pi."""
    angles = {"ell2", "z", "g", "gamma2", "theta_node", "phi"}
    worst = 0.0
    for f in fields(p):
        a, b = getattr(p, f.name), getattr(q, f.name)
        d = abs(wrap_angle(a - b)) if f.name in angles else abs(a - b) / max(1.0, abs(a))
        worst = max(worst, d)
    return worst


__all__ = [
    "CartesianPair", "KPoint", "LiouvillePoint", "PPoint", "inner_angular_momentum_sq",
    "k_forward", "k_inverse", "lenz_vector", "liouville_R_Phi2", "liouville_from_p",
    "liouville_radius", "oriented_angle", "p_forward", "p_inverse", "point_distance",
    "random_kpoint", "random_ppoint", "symplectic_defect",
]

"""Averages of the Newtonian interaction over the outer Keplerian orbit.

* ``outer_average`` (h1): average over the outer mean anomaly with the
  inner body fixed.
* ``dual_average`` (h2): same, with the inner position replaced by
  ``r1`` times the unit inner angular momentum.
* ``mixed_average`` (h3): additionally averaged over the inner angle
  around a fixed direction ``N1``.
* ``epsilon_project`` and ``bridge_average``: the Legendre-series route
  to h3 through the projection ``a_2m -> delta_2m a_2m``.

Every average over the outer orbit is computed with the periodic trapezoid
rule in the eccentric anomaly, using ``d ell = rho d zeta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .elements import MassParams, OrbitGeometry, anomalies
from .errors import CollisionError, ConvergenceError, DomainError
from .legendre import delta, legendre_all

DEFAULT_NODES = 256
DEFAULT_NODES_2D = (128, 256)
COLLISION_TOL = 1e-20


def periodic_nodes(n):
    """Equispaced nodes of the periodic trapezoid rule on [0, 2 pi)."""
    if n < 1:
        raise DomainError("need at least one node")
    return 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class ReducedSecularPoint:
    """The variables ``(r1, Lambda2, Theta, Gamma2, gamma2)`` on which h1 and the
    first integral depend."""

    r1: float
    Lambda2: float
    Theta: float
    Gamma2: float
    gamma2: float
    masses: MassParams = field(default_factory=MassParams.normalized)

    def __post_init__(self):
        if self.r1 < 0:
            raise DomainError("r1 must be non-negative")
        if not abs(self.Theta) <= self.Gamma2 <= self.Lambda2 * (1 + 1e-14):
            raise DomainError("need |Theta| <= Gamma2 <= Lambda2")
        if self.Gamma2 <= 0:
            raise DomainError("Gamma2 must be positive")
        if self.r1 >= self.a2:
            raise DomainError("need r1 < a2")

    @property
    def a2(self):
        return self.masses.semi_major_axis(self.Lambda2, 2)

    @property
    def eps(self):
        return self.r1 / self.a2

    @property
    def e2(self):
        return math.sqrt(max(0.0, 1.0 - (self.Gamma2 / self.Lambda2) ** 2))

    @property
    def sin_incl(self):
        """sqrt(1 - Theta^2/Gamma2^2)."""
        return math.sqrt(max(0.0, 1.0 - (self.Theta / self.Gamma2) ** 2))

    def with_(self, **kw):
        vals = {k: getattr(self, k) for k in
                ("r1", "Lambda2", "Theta", "Gamma2", "gamma2", "masses")}
        vals.update(kw)
        return ReducedSecularPoint(**vals)


@dataclass(frozen=True)
class DualPoint:
    """Geometry of the dual average: mutual inclination ``iota`` and outer
    perihelion argument ``g2`` measured from the common node."""

    r1: float
    Lambda2: float
    G2: float
    iota: float
    g2: float
    masses: MassParams = field(default_factory=MassParams.normalized)

    def __post_init__(self):
        if not 0 < self.G2 <= self.Lambda2 * (1 + 1e-14):
            raise DomainError("need 0 < G2 <= Lambda2")
        if not 0.0 <= self.iota <= math.pi:
            raise DomainError("iota must lie in [0, pi]")
        if self.r1 < 0:
            raise DomainError("r1 must be non-negative")

    @property
    def a2(self):
        return self.masses.semi_major_axis(self.Lambda2, 2)

    @property
    def e2(self):
        return math.sqrt(max(0.0, 1.0 - (self.G2 / self.Lambda2) ** 2))

    def to_reduced(self):
        """Image under the duality map: Theta = G2 cos(iota), gamma2 = g2."""
        return ReducedSecularPoint(r1=self.r1, Lambda2=self.Lambda2,
                                   Theta=self.G2 * math.cos(self.iota),
                                   Gamma2=self.G2, gamma2=self.g2, masses=self.masses)


def _check_collision(d2, a2):
    if np.min(d2) < COLLISION_TOL * a2 * a2:
        raise CollisionError("orbit crossing: the distance vanishes on the quadrature grid")


def _kepler_average(r1, a2, e, s, angle, nodes):
    """mean over zeta of rho / sqrt(r1^2 + 2 r1 a2 rho s cos(angle + nu) + a2^2 rho^2)."""
    zeta = periodic_nodes(nodes)
    nu, rho = anomalies(e, zeta)
    d2 = r1 * r1 + 2 * r1 * a2 * rho * s * np.cos(angle + nu) + (a2 * rho) ** 2
    _check_collision(d2, a2)
    return float(np.mean(rho / np.sqrt(d2)))


def outer_average(p: ReducedSecularPoint, nodes=DEFAULT_NODES):
    """h1: the interaction averaged over the outer mean anomaly."""
    if nodes < 64:
        raise DomainError("need at least 64 nodes")
    return _kepler_average(p.r1, p.a2, p.e2, p.sin_incl, p.gamma2, nodes)


def dual_average(p: DualPoint, nodes=DEFAULT_NODES):
    """h2: mean over ell2 of 1/|r1 C1_hat - x2|.

    The outer orbit lies in the horizontal plane with perihelion
    ``(sin g2, -cos g2, 0)``; the inner unit angular momentum is
    ``(0, sin iota, cos iota)``.
    """
    if nodes < 64:
        raise DomainError("need at least 64 nodes")
    zeta = periodic_nodes(nodes)
    nu, rho = anomalies(p.e2, zeta)
    a2 = p.a2
    u = p.g2 + nu
    x2 = a2 * rho[:, None] * np.stack([np.sin(u), -np.cos(u), np.zeros_like(u)], axis=1)
    c1 = p.r1 * np.array([0.0, math.sin(p.iota), math.cos(p.iota)])
    d2 = np.sum((c1 - x2) ** 2, axis=1)
    _check_collision(d2, a2)
    return float(np.mean(rho / np.sqrt(d2)))


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise DomainError("direction must be nonzero")
    return v / n


def direction_from_angles(polar, azimuth):
    """Unit vector from spherical angles (polar angle from the vertical axis)."""
    return np.array([math.sin(polar) * math.cos(azimuth),
                     math.sin(polar) * math.sin(azimuth),
                     math.cos(polar)])


def _orbit_positions(orbit: OrbitGeometry, g2, nodes):
    """Outer positions on the eccentric-anomaly grid, perihelion (sin g2, -cos g2, 0)."""
    zeta = periodic_nodes(nodes)
    nu, rho = anomalies(orbit.e2, zeta)
    u = g2 + nu
    x2 = orbit.a2 * rho[:, None] * np.stack([np.sin(u), -np.cos(u), np.zeros_like(u)], axis=1)
    return x2, rho


def _plane_basis(N):
    """Orthonormal basis of the plane orthogonal to the unit vector N."""
    helper = np.array([1.0, 0.0, 0.0]) if abs(N[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(N, helper)
    u /= np.linalg.norm(u)
    return u, np.cross(N, u)


def mixed_average(r1, N1, orbit: OrbitGeometry, g2=0.0, nodes2d=DEFAULT_NODES_2D):
    """h3: mean over the inner angle phi1 and the outer mean anomaly of 1/|x1 - x2|.

    ``x1`` runs over the circle of radius ``r1`` orthogonal to ``N1``.  The
    circle average does not depend on where phi1 is measured from, so a
    fixed basis of the plane is used instead of the node ``x2 x N1``.
    """
    if r1 >= orbit.a2 * (1 - orbit.e2):
        raise DomainError("need r1 < a2 (1 - e2)")
    N = _unit(N1)
    n_phi, n_zeta = nodes2d
    x2, rho = _orbit_positions(orbit, g2, n_zeta)
    u, v = _plane_basis(N)
    phi = periodic_nodes(n_phi)
    x1 = r1 * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v)
    diff = x1[:, None, :] - x2[None, :, :]
    d2 = np.sum(diff * diff, axis=2)
    _check_collision(d2, orbit.a2)
    inner = np.mean(1.0 / np.sqrt(d2), axis=0)
    return float(np.mean(rho * inner))


@dataclass(frozen=True)
class PowerSeries:
    """Truncated power series ``sum_n a_n eps^n``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise DomainError("series needs at least one coefficient")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise DomainError("coefficients must be finite")

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __call__(self, eps):
        out = 0.0
        for c in reversed(self.coeffs):
            out = out * eps + c
        return out


def epsilon_project(s: PowerSeries) -> PowerSeries:
    """Multiply the coefficient of eps^n by delta_n (zero for odd n)."""
    return PowerSeries(tuple(delta(n) * c for n, c in enumerate(s.coeffs)))


def bridge_series(N1, orbit: OrbitGeometry, order, g2=0.0, nodes=DEFAULT_NODES):
    """Coefficients a_n = mean over ell2 of rho^(-n-1) P_n(N1 . x2/|x2|)."""
    N = _unit(N1)
    x2, rho = _orbit_positions(orbit, g2, nodes)
    t = (x2 @ N) / (orbit.a2 * rho)
    P = legendre_all(order, np.clip(t, -1.0, 1.0))
    weights = rho[None, :] ** -np.arange(order + 1)[:, None]
    return PowerSeries(tuple(np.mean(P * weights, axis=1)))


def bridge_average(r1, N1, orbit: OrbitGeometry, series_order=20, nodes=DEFAULT_NODES,
                   g2=0.0, tol=None):
    """h3 through the projected Legendre series, evaluated at eps = r1/a2.

    Raises ``ConvergenceError`` when eps >= 1 - e2, or when the tail bound
    ``q^(N+1)/(1-q)/a2`` with ``q = eps/(1-e2)`` exceeds ``tol``.
    """
    eps = r1 / orbit.a2
    q = eps / (1.0 - orbit.e2)
    if q >= 1.0:
        raise ConvergenceError("series diverges: eps >= 1 - e2", residual=math.inf)
    tail = q ** (series_order + 1) / (1.0 - q) / orbit.a2
    if tol is not None and tail > tol:
        raise ConvergenceError(f"truncation bound {tail:.3e} exceeds tolerance {tol:.3e}",
                               residual=tail)
    series = epsilon_project(bridge_series(N1, orbit, series_order, g2, nodes))
    return series(eps) / orbit.a2


def phi1_average_defect(r1, N1, x2, nodes=DEFAULT_NODES, order=40, tol=None):
    """Circle average of 1/|x1 - x2| against its Legendre series.

    Returns ``(lhs, rhs, defect)`` with
    ``rhs = (1/r2) sum_n (r1/r2)^n delta_n P_n(x2 . N1 / r2)``.
    """
    N = _unit(N1)
    x2 = np.asarray(x2, dtype=float)
    r2 = float(np.linalg.norm(x2))
    if r2 == 0:
        raise DomainError("x2 must be nonzero")
    q = r1 / r2
    if q >= 1:
        raise DomainError("need r1 < |x2|")
    tail = q ** (order + 1) / (1 - q) / r2
    if tol is not None and tail > tol:
        raise ConvergenceError(f"truncation bound {tail:.3e} exceeds tolerance", residual=tail)
    u, v = _plane_basis(N)
    phi = periodic_nodes(nodes)
    x1 = r1 * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v)
    lhs = float(np.mean(1.0 / np.linalg.norm(x1 - x2, axis=1)))
    t = float(np.clip(np.dot(x2, N) / r2, -1.0, 1.0))
    P = legendre_all(order, t)
    rhs = float(sum((-q) ** n * delta(n) * P[n] for n in range(order + 1))) / r2
    return lhs, rhs, abs(lhs - rhs)

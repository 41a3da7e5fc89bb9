"""Keplerian element kinematics.

Anomaly conversions, the Kepler equation, the two elementary rotation
matrices and the mass bookkeeping of the heliocentric planetary problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MassParams:
    """Masses of star (m0) and planets (m1, m2) with the rescaling parameter mu.

    The reduced masses ``frak_m(i) = m0*mi/(m0 + mu*mi)`` and the
    gravitational parameters ``frak_M(i) = m0 + mu*mi`` are derived on
    access, never stored.
    """

    m0: float = 1.0
    m1: float = 1.0e-3
    m2: float = 1.0e-3
    mu: float = 1.0

    def __post_init__(self):
        if min(self.m0, self.m1, self.m2) <= 0:
            raise DomainError("masses must be positive")
        if self.mu < 0:
            raise DomainError("mu must be non-negative")

    def _mi(self, i):
        if i == 1:
            return self.m1
        if i == 2:
            return self.m2
        raise DomainError(f"planet index must be 1 or 2, got {i}")

    def frak_m(self, i):
        mi = self._mi(i)
        return self.m0 * mi / (self.m0 + self.mu * mi)

    def frak_M(self, i):
        return self.m0 + self.mu * self._mi(i)

    def semi_major_axis(self, Lambda, i=2):
        """a = Lambda^2 / (frak_M * frak_m^2)."""
        m = self.frak_m(i)
        return Lambda**2 / (self.frak_M(i) * m * m)

    def Lambda_from_a(self, a, i=2):
        return self.frak_m(i) * math.sqrt(self.frak_M(i) * a)

    def kepler_energy(self, Lambda, i=2):
        """Two-body energy -frak_m^3 frak_M^2 / (2 Lambda^2)."""
        m = self.frak_m(i)
        return -(m**3) * self.frak_M(i) ** 2 / (2.0 * Lambda**2)

    @classmethod
    def normalized(cls):
        """Masses with frak_m2 = frak_M2 = 1, so that a2 = Lambda2^2."""
        return cls(m0=1.0, m1=1.0, m2=1.0, mu=0.0)

    @classmethod
    def with_outer(cls, frak_M2, frak_m2=1.0):
        """Masses realising prescribed outer parameters (mu = 0)."""
        return cls(m0=frak_M2, m1=frak_m2, m2=frak_m2, mu=0.0)


@dataclass(frozen=True)
class OrbitGeometry:
    """Size and shape of the outer ellipse."""

    a2: float
    e2: float
    Lambda2: float
    G2: float

    def __post_init__(self):
        if self.a2 <= 0:
            raise DomainError("a2 must be positive")
        if not 0.0 <= self.e2 < 1.0:
            raise DomainError("e2 must lie in [0, 1)")
        if not 0.0 < self.G2 <= self.Lambda2 * (1.0 + 1e-15):
            raise DomainError("need 0 < G2 <= Lambda2")

    @classmethod
    def from_elements(cls, a2, e2, masses=None):
        masses = masses or MassParams.normalized()
        Lam = masses.Lambda_from_a(a2)
        return cls(a2=a2, e2=e2, Lambda2=Lam, G2=Lam * math.sqrt(1.0 - e2 * e2))

    @classmethod
    def from_actions(cls, Lambda2, G2, masses=None):
        masses = masses or MassParams.normalized()
        e2 = math.sqrt(max(0.0, 1.0 - (G2 / Lambda2) ** 2))
        return cls(a2=masses.semi_major_axis(Lambda2), e2=e2, Lambda2=Lambda2, G2=G2)


def _check_ecc(e):
    if not (0.0 <= e < 1.0):
        raise DomainError(f"eccentricity must lie in [0, 1), got {e!r}")


def solve_kepler(e, ell, tol=1e-15, maxiter=50):
    """Eccentric anomaly zeta solving zeta - e*sin(zeta) = ell.

    Newton iteration from zeta0 = ell + e*sin(ell) on the reduced mean
    anomaly, falling back to bisection on [0, 2*pi] if Newton has not
    converged after ``maxiter`` steps.  The result lies in the same
    2*pi branch as ``ell``.
    """
    _check_ecc(e)
    if not math.isfinite(ell):
        raise DomainError("mean anomaly must be finite")
    k = math.floor(ell / TWO_PI)
    M = ell - k * TWO_PI
    if e == 0.0:
        return ell
    z = M + e * math.sin(M)
    for _ in range(maxiter):
        f = z - e * math.sin(z) - M
        dz = f / (1.0 - e * math.cos(z))
        z -= dz
        if abs(dz) < tol:
            break
    else:
        lo, hi = 0.0, TWO_PI
        for _ in range(200):
            z = 0.5 * (lo + hi)
            if z - e * math.sin(z) - M > 0:
                hi = z
            else:
                lo = z
            if hi - lo < 1e-16:
                break
    return z + k * TWO_PI


def mean_anomaly(e, zeta):
    return zeta - e * np.sin(zeta)


def anomalies(e, zeta):
    """True anomaly and normalized radius rho = r/a at eccentric anomaly zeta.

    Works elementwise on arrays.
    """
    _check_ecc(e)
    zeta = np.asarray(zeta, dtype=float)
    rho = 1.0 - e * np.cos(zeta)
    nu = np.arctan2(math.sqrt(1.0 - e * e) * np.sin(zeta), np.cos(zeta) - e)
    if nu.ndim == 0:
        return float(nu), float(rho)
    return nu, rho


def eccentric_from_true(e, nu):
    _check_ecc(e)
    return 2.0 * math.atan2(math.sqrt(1.0 - e) * math.sin(nu / 2.0),
                            math.sqrt(1.0 + e) * math.cos(nu / 2.0))


def rot1(angle):
    """Rotation about the first axis."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, c, -s],
                     [0.0, s, c]])


def rot3(angle):
    """Rotation about the third axis."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0],
                     [s, c, 0.0],
                     [0.0, 0.0, 1.0]])


def wrap_angle(x):
    """Reduce an angle to (-pi, pi]."""
    y = math.remainder(x, TWO_PI)
    return math.pi if y == -math.pi else y

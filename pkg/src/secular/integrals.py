"""The first integral of the outer average and related conserved quantities.

* ``calG_squared`` / ``calG_cartesian``: the integral in reduced and in
  Cartesian variables.
* ``energy_E`` / ``g_p``: the one-dimensional quadrature representing h1 as
  a function of the integral, and its family with general exponent.
* ``levelset_sweep`` / ``levelset_defect``: h1 is constant on level sets
  of the integral and equals ``energy_E`` there.
* ``separatrix_locus``: critical points of ``energy_E`` in the integral.
* ``bracket_defect``: reduced Poisson bracket of h1 with the integral.
* two-centre and auxiliary Hamiltonians with their integrals, and the
  three-body Hamiltonian in the outer Kepler chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .averaging import (
    DEFAULT_NODES,
    ReducedSecularPoint,
    _check_collision,
    outer_average,
    periodic_nodes,
)
from .charts import (
    CartesianPair,
    KPoint,
    LiouvillePoint,
    inner_angular_momentum_sq,
    k_forward,
    lenz_vector,
    liouville_from_p,
    p_inverse,
)
from .elements import MassParams
from .errors import (
    CollisionError,
    DomainError,
    LevelSetError,
    NoRootError,
    SingularChartError,
    VerificationError,
)

# ---------------------------------------------------------------------------
# First integral


def _b_term(Lambda2, Gamma2, Theta):
    """sqrt(1 - Gamma2^2/Lambda2^2) sqrt(1 - Theta^2/Gamma2^2)."""
    return (math.sqrt(max(0.0, 1.0 - (Gamma2 / Lambda2) ** 2))
            * math.sqrt(max(0.0, 1.0 - (Theta / Gamma2) ** 2)))


def calG_squared(p: ReducedSecularPoint):
    """G^2/Lambda2^2 = Gamma2^2/Lambda2^2 + eps e2 sqrt(1-Theta^2/Gamma2^2) cos(gamma2)."""
    return ((p.Gamma2 / p.Lambda2) ** 2
            + p.eps * _b_term(p.Lambda2, p.Gamma2, p.Theta) * math.cos(p.gamma2))


def calG(p: ReducedSecularPoint):
    """The first integral itself (same units as Lambda2)."""
    return p.Lambda2 * math.sqrt(calG_squared(p))


def calG_cartesian(c: CartesianPair, m: MassParams):
    """G^2/Lambda2^2 from Cartesian data through the outer Lenz vector.

    Equals ``G2^2/Lambda2^2 - (x1 . L2)/(frak_M2 frak_m2^2 a2)``, which is
    continuous through circular outer orbits.
    """
    mm, MM = m.frak_m(2), m.frak_M(2)
    y2, x2, x1 = (np.asarray(v, dtype=float) for v in (c.y2, c.x2, c.x1))
    energy = float(np.dot(y2, y2)) / (2 * mm) - mm * MM / np.linalg.norm(x2)
    if energy >= 0:
        raise DomainError("outer two-body energy must be negative")
    Lambda2 = math.sqrt(mm**3 * MM**2 / (-2.0 * energy))
    a2 = m.semi_major_axis(Lambda2, 2)
    C2 = np.cross(x2, y2)
    L2 = lenz_vector(y2, x2, MM, mm)
    return float(np.dot(C2, C2)) / Lambda2**2 - float(np.dot(x1, L2)) / (MM * mm * mm * a2)


# ---------------------------------------------------------------------------
# Energy representation


@dataclass(frozen=True)
class EnergyArgs:
    r1: float
    a2: float
    Theta: float
    Lambda2: float
    G: float

    def __post_init__(self):
        if self.r1 < 0 or self.a2 < 0:
            raise DomainError("r1 and a2 must be non-negative")
        if not abs(self.Theta) <= self.G * (1 + 1e-14) or not self.G <= self.Lambda2 * (1 + 1e-14):
            raise DomainError("need |Theta| <= G <= Lambda2")

    @property
    def calE(self):
        return math.sqrt(max(0.0, self.Lambda2**2 - self.G**2)) / self.Lambda2

    @property
    def calI(self):
        return math.sqrt(max(0.0, self.G**2 - self.Theta**2)) / self.Lambda2


def g_p(r1, a2, calE, calI, p=0.5, nodes=DEFAULT_NODES):
    """mean over zeta of (1 - E cos z) / D^p, with
    D = r1^2 + a2^2 - 2 a2 (r1 I sin z + a2 E cos z) + a2^2 E^2 cos^2 z."""
    zeta = periodic_nodes(nodes)
    c, s = np.cos(zeta), np.sin(zeta)
    D = r1 * r1 + a2 * a2 - 2 * a2 * (r1 * calI * s + a2 * calE * c) + (a2 * calE * c) ** 2
    _check_collision(D, max(a2, r1))
    return float(np.mean((1.0 - calE * c) / D**p))


def energy_E(a: EnergyArgs, nodes=DEFAULT_NODES):
    """h1 expressed through the first integral."""
    return g_p(a.r1, a.a2, a.calE, a.calI, 0.5, nodes)


def energy_E_dG(a: EnergyArgs, nodes=DEFAULT_NODES):
    """Derivative of ``energy_E`` in G, differentiating under the integral."""
    zeta = periodic_nodes(nodes)
    c, s = np.cos(zeta), np.sin(zeta)
    r1, a2, E, I = a.r1, a.a2, a.calE, a.calI
    D = r1 * r1 + a2 * a2 - 2 * a2 * (r1 * I * s + a2 * E * c) + (a2 * E * c) ** 2
    _check_collision(D, a2)
    num = 1.0 - E * c
    dE_int = np.mean(-c / np.sqrt(D) - num * (a2 * a2 * c * (E * c - 1.0)) / D**1.5)
    dI_int = np.mean(num * a2 * r1 * s / D**1.5)
    if E == 0 or I == 0:
        raise SingularChartError("derivative undefined where E or I vanishes")
    L2 = a.Lambda2**2
    return float(dE_int * (-a.G / (L2 * E)) + dI_int * (a.G / (L2 * I)))


# ---------------------------------------------------------------------------
# Level sets


@dataclass(frozen=True)
class LevelSetResult:
    G: float
    gammas: np.ndarray
    Gammas: np.ndarray
    values: np.ndarray
    energy: float
    defect: float
    energy_mismatch: float


def solve_gamma_on_level(G2_over_L2, r1, Lambda2, Theta, gamma2, masses, margin=1e-8):
    """Gamma2 solving calG_squared(r1, Lambda2, Theta, Gamma2, gamma2) = G2_over_L2."""
    lo = abs(Theta) + margin * Lambda2
    hi = Lambda2 * (1.0 - margin)

    def f(Gam):
        p = ReducedSecularPoint(r1, Lambda2, Theta, Gam, gamma2, masses)
        return calG_squared(p) - G2_over_L2

    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise LevelSetError(f"level set leaves the chart at gamma2 = {gamma2:.6f}")
    return brentq(f, lo, hi, xtol=1e-15 * Lambda2, rtol=4 * np.finfo(float).eps, maxiter=200)


def levelset_sweep(p: ReducedSecularPoint, nodes=DEFAULT_NODES, grid=64):
    """Evaluate h1 along the level set of the first integral through ``p``."""
    target = calG_squared(p)
    G = p.Lambda2 * math.sqrt(target)
    gammas = 2 * np.pi * np.arange(grid) / grid
    Gammas = np.array([solve_gamma_on_level(target, p.r1, p.Lambda2, p.Theta, g, p.masses)
                       for g in gammas])
    values = np.array([outer_average(p.with_(Gamma2=Gam, gamma2=g), nodes)
                       for g, Gam in zip(gammas, Gammas)])
    energy = energy_E(EnergyArgs(p.r1, p.a2, p.Theta, p.Lambda2, min(G, p.Lambda2)), nodes)
    return LevelSetResult(G=G, gammas=gammas, Gammas=Gammas, values=values, energy=energy,
                          defect=float(values.max() - values.min()),
                          energy_mismatch=float(np.max(np.abs(values - energy))))


def levelset_defect(p: ReducedSecularPoint, nodes=DEFAULT_NODES, grid=64, tol=1e-9):
    """Spread of h1 along the level set; checks agreement with ``energy_E``."""
    res = levelset_sweep(p, nodes, grid)
    if res.energy_mismatch > tol:
        raise VerificationError(
            f"level values differ from the energy representation by {res.energy_mismatch:.3e}")
    return res.defect


# ---------------------------------------------------------------------------
# Separatrices


@dataclass(frozen=True)
class SeparatrixResult:
    G: float
    ratio: float
    dE_dG: float
    leading_order_deviation: float


SQRT_5_3 = math.sqrt(5.0 / 3.0)


def separatrix_locus(r1, a2, Lambda2, Theta, nodes=DEFAULT_NODES, scan=400):
    """Root of dE/dG in the open interval (|Theta|, Lambda2).

    The derivative is taken under the integral sign.  The reported
    ``leading_order_deviation`` is ``sqrt(3) G - sqrt(5) |Theta|`` (zero when
    G/|Theta| = sqrt(5/3)).
    """
    if Theta == 0:
        raise NoRootError("Theta = 0: the critical locus is on the boundary G = 0")
    lo, hi = abs(Theta), Lambda2
    width = hi - lo
    grid = lo + width * (np.arange(1, scan) / scan)

    def f(G):
        return energy_E_dG(EnergyArgs(r1, a2, Theta, Lambda2, G), nodes)

    vals = np.array([f(G) for G in grid])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size == 0:
        raise NoRootError("dE/dG has no sign change in (|Theta|, Lambda2)")
    k = int(idx[0])
    G = brentq(f, grid[k], grid[k + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return SeparatrixResult(G=G, ratio=G / abs(Theta), dE_dG=f(G),
                            leading_order_deviation=math.sqrt(3) * G - math.sqrt(5) * abs(Theta))


# ---------------------------------------------------------------------------
# Reduced Poisson bracket


def _reduced_funcs(p: ReducedSecularPoint, nodes, calG_fn=None):
    calG_fn = calG_fn or calG_squared

    def h(Gam, gam):
        return outer_average(p.with_(Gamma2=Gam, gamma2=gam), nodes)

    def g(Gam, gam):
        return calG_fn(p.with_(Gamma2=Gam, gamma2=gam))

    return h, g


def reduced_bracket(f, g, Gamma, gamma, h_fd):
    """{f, g} = d_gamma f d_Gamma g - d_Gamma f d_gamma g by central differences.

    Returns ``(bracket, |grad f|, |grad g|)``.
    """
    def grad(fn):
        dG = (fn(Gamma + h_fd, gamma) - fn(Gamma - h_fd, gamma)) / (2 * h_fd)
        dg = (fn(Gamma, gamma + h_fd) - fn(Gamma, gamma - h_fd)) / (2 * h_fd)
        return dG, dg

    fG, fg = grad(f)
    gG, gg = grad(g)
    return fg * gG - fG * gg, math.hypot(fG, fg), math.hypot(gG, gg)


def bracket_defect(p: ReducedSecularPoint, h_fd=1e-5, nodes=DEFAULT_NODES,
                   normalized=False, calG_fn=None):
    """Bracket of h1 with the first integral in the pair (Gamma2, gamma2).

    With ``normalized=True`` the absolute bracket is divided by
    ``|grad h1| |grad G^2|``.  ``calG_fn`` replaces the integral (used for
    negative controls).
    """
    if not 1e-6 * p.Lambda2 <= h_fd <= 1e-4 * p.Lambda2:
        raise DomainError("h_fd must lie in [1e-6, 1e-4] x Lambda2")
    if (p.Gamma2 - abs(p.Theta) < 10 * h_fd or p.Lambda2 - p.Gamma2 < 10 * h_fd):
        raise SingularChartError("point too close to the chart boundary")
    h, g = _reduced_funcs(p, nodes, calG_fn)
    br, nh, ng = reduced_bracket(h, g, p.Gamma2, p.gamma2, h_fd)
    if normalized:
        return abs(br) / (nh * ng)
    return abs(br)


# ---------------------------------------------------------------------------
# Two-centre problem


@dataclass(frozen=True)
class TwoCentreState:
    y: np.ndarray
    x: np.ndarray
    m_plus: float
    m_minus: float
    x0: np.ndarray

    def __post_init__(self):
        for name in ("y", "x", "x0"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))


def _centre_distances(s: TwoCentreState):
    dp = float(np.linalg.norm(s.x + s.x0))
    dm = float(np.linalg.norm(s.x - s.x0))
    if dp == 0 or dm == 0:
        raise CollisionError("particle collides with a centre")
    return dp, dm


def two_centre_energy(s: TwoCentreState):
    dp, dm = _centre_distances(s)
    return 0.5 * float(np.dot(s.y, s.y)) - s.m_plus / dp - s.m_minus / dm


def two_centre_N(s: TwoCentreState):
    """|x x y|^2 + (x0 . y)^2 + 2 x . x0 (m+/|x+x0| - m-/|x-x0|)."""
    dp, dm = _centre_distances(s)
    C = np.cross(s.x, s.y)
    return (float(np.dot(C, C)) + float(np.dot(s.x0, s.y)) ** 2
            + 2 * float(np.dot(s.x, s.x0)) * (s.m_plus / dp - s.m_minus / dm))


def two_centre_Theta(s: TwoCentreState):
    n0 = float(np.linalg.norm(s.x0))
    if n0 == 0:
        raise DomainError("Theta needs x0 != 0")
    return float(np.dot(s.x0, np.cross(s.x, s.y))) / n0


def two_centre_liouville(s: TwoCentreState) -> LiouvillePoint:
    """Elliptic coordinates of a two-centre state.

    The state is lifted to the P chart with an auxiliary impulse conjugate
    to ``x0``; the elliptic coordinates do not depend on that choice.
    """
    n0 = float(np.dot(s.x0, s.x0))
    if n0 == 0:
        raise DomainError("elliptic coordinates need x0 != 0")
    y0 = np.cross(np.array([1.0, 0.3, 0.2]), s.x0) / n0 + 0.1 * s.x0
    return liouville_from_p(p_inverse(y0, s.x0, s.y, s.x))


def liouville_F_mu(lp: LiouvillePoint, E, m_plus, m_minus):
    """F^(mu) = p_mu^2 (1-mu^2) + Theta^2/(1-mu^2) + 2 r0 (m+ - m-) mu + 2 r0^2 mu^2 E."""
    mu = lp.mu
    return (lp.p_mu**2 * (1 - mu * mu) + lp.Theta**2 / (1 - mu * mu)
            + 2 * lp.r0 * (m_plus - m_minus) * mu + 2 * lp.r0**2 * mu * mu * E)


def liouville_F_lambda(lp: LiouvillePoint, E, m_plus, m_minus):
    """F^(lambda) = -p_l^2 (l^2-1) - Theta^2/(l^2-1) + 2 r0 (m+ + m-) l + 2 r0^2 l^2 E."""
    lam = lp.lam
    return (-lp.p_lambda**2 * (lam * lam - 1) - lp.Theta**2 / (lam * lam - 1)
            + 2 * lp.r0 * (m_plus + m_minus) * lam + 2 * lp.r0**2 * lam * lam * E)


def liouville_energy(lp: LiouvillePoint, m_plus, m_minus):
    """Two-centre Hamiltonian written in elliptic coordinates."""
    lam, mu, r0 = lp.lam, lp.mu, lp.r0
    d = lam * lam - mu * mu
    return ((lp.p_lambda**2 * (lam * lam - 1) + lp.p_mu**2 * (1 - mu * mu)) / (2 * r0**2 * d)
            + lp.Theta**2 / (2 * r0**2 * d) * (1 / (1 - mu * mu) + 1 / (lam * lam - 1))
            - ((m_plus + m_minus) * lam - (m_plus - m_minus) * mu) / (r0 * d))


# ---------------------------------------------------------------------------
# Auxiliary problem


@dataclass(frozen=True)
class AuxState:
    y2: np.ndarray
    x2: np.ndarray
    x1: np.ndarray
    masses: MassParams = field(default_factory=MassParams)

    def __post_init__(self):
        for name in ("y2", "x2", "x1"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))


def _aux_distances(s: AuxState):
    r1 = float(np.linalg.norm(s.x1))
    r2 = float(np.linalg.norm(s.x2))
    d = float(np.linalg.norm(s.x1 - s.x2))
    if r1 == 0 or r2 == 0 or d == 0:
        raise CollisionError("collision in the auxiliary problem")
    return r1, r2, d


def aux_hamiltonian(s: AuxState):
    """|y2|^2/(2 m2) - m2 M2/|x2| - mu m1 m2/|x1 - x2| (reduced masses m2, M2)."""
    m = s.masses
    _, r2, d = _aux_distances(s)
    mm, MM = m.frak_m(2), m.frak_M(2)
    return (float(np.dot(s.y2, s.y2)) / (2 * mm) - mm * MM / r2
            - m.mu * m.m1 * m.m2 / d)


def aux_calG_squared(s: AuxState):
    """(|C2|^2 - x1 . L2)/frak_m2."""
    m = s.masses
    C2 = np.cross(s.x2, s.y2)
    L2 = lenz_vector(s.y2, s.x2, m.frak_M(2), m.frak_m(2))
    return (float(np.dot(C2, C2)) - float(np.dot(s.x1, L2))) / m.frak_m(2)


def aux_calH(s: AuxState):
    """m1 m2 (x1 - x2) . x1 / |x1 - x2|."""
    _, _, d = _aux_distances(s)
    return s.masses.m1 * s.masses.m2 * float(np.dot(s.x1 - s.x2, s.x1)) / d


def aux_N(s: AuxState):
    """The integral G^2_aux + mu H_aux of the auxiliary Hamiltonian."""
    return aux_calG_squared(s) + s.masses.mu * aux_calH(s)


def aux_N_hat(s: AuxState):
    """The integral obtained by mapping the two-centre integral back to the
    auxiliary problem, before dropping the multiple of the energy."""
    m = s.masses
    _, r2, d = _aux_distances(s)
    mm, MM = m.frak_m(2), m.frak_M(2)
    w = s.x2 - 0.5 * s.x1
    c = np.cross(w, s.y2)
    return (float(np.dot(c, c)) / mm + float(np.dot(s.x1, s.y2)) ** 2 / (4 * mm)
            + float(np.dot(s.x1, w)) * (MM * mm / r2 - m.mu * m.m1 * m.m2 / d))


# ---------------------------------------------------------------------------
# Three-body problem


def three_body_cartesian(c: CartesianPair, m: MassParams):
    """Heliocentric three-body Hamiltonian, direct plus indirect interaction."""
    y1, y2, x1, x2 = c.y1, c.y2, c.x1, c.x2
    r1, r2 = np.linalg.norm(x1), np.linalg.norm(x2)
    d = np.linalg.norm(x1 - x2)
    if r1 == 0 or r2 == 0 or d == 0:
        raise CollisionError("collision in the three-body problem")
    kep = sum(float(np.dot(y, y)) / (2 * m.frak_m(i)) - m.frak_m(i) * m.frak_M(i) / r
              for i, y, r in ((1, y1, r1), (2, y2, r2)))
    f = 1.0 / d - float(np.dot(y1, y2)) / (m.m0 * m.m1 * m.m2)
    return float(kep - m.mu * m.m1 * m.m2 * f)


def three_body_in_K(p: KPoint, m: MassParams):
    """Three-body Hamiltonian in the outer Kepler chart.

    The Keplerian part is written in chart variables (radial impulse,
    inner angular momentum from the chart formula, outer Kepler energy);
    the interaction is evaluated on the Cartesian image.
    """
    m1, M1 = m.frak_m(1), m.frak_M(1)
    C1sq = inner_angular_momentum_sq(p)
    kep = (p.R1**2 / (2 * m1) + C1sq / (2 * m1 * p.r1**2) - m1 * M1 / p.r1
           + m.kepler_energy(p.Lambda2, 2))
    c = k_forward(p, m)
    d = np.linalg.norm(c.x1 - c.x2)
    if d == 0:
        raise CollisionError("collision in the three-body problem")
    f = 1.0 / d - float(np.dot(c.y1, c.y2)) / (m.m0 * m.m1 * m.m2)
    return float(kep - m.mu * m.m1 * m.m2 * f)

"""Hamiltonian flows and conservation measurements.

Three systems are available, all of the form ``H = T(y) + V(x)``:

* ``"two_centre"``: a particle attracted by masses ``m_plus`` at ``-x0``
  and ``m_minus`` at ``+x0``; state ``(y, x)``;
* ``"aux"``: the outer planet under the star and a frozen inner planet at
  ``x1``; state ``(y2, x2)``;
* ``"three_body"``: the heliocentric planetary problem with the indirect
  term; state ``(y1, y2, x1, x2)``.

Integrators: ``"dop853"`` (adaptive 8th order, via scipy) and
``"yoshida4"`` (fixed-step 4th-order symmetric composition of the
leapfrog, which conserves the angular-momentum-type quadratic invariants
exactly up to roundoff).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .elements import MassParams
from .errors import CollisionApproachError, DomainError
from .integrals import (
    AuxState,
    TwoCentreState,
    aux_N,
    aux_hamiltonian,
    two_centre_N,
    two_centre_Theta,
    two_centre_energy,
)

COLLISION_FRACTION = 1e-6


@dataclass
class System:
    """Separable Hamiltonian ``T(y) + V(x)`` with its gradients."""

    name: str
    dim: int
    energy: Callable
    grad_T: Callable
    grad_V: Callable
    min_separation: Callable
    scale: float


def two_centre_system(m_plus, m_minus, x0):
    x0 = np.asarray(x0, dtype=float)
    r0 = float(np.linalg.norm(x0))

    def grad_V(x):
        dp, dm = x + x0, x - x0
        return (m_plus * dp / np.linalg.norm(dp) ** 3
                + m_minus * dm / np.linalg.norm(dm) ** 3)

    def energy(z):
        return two_centre_energy(TwoCentreState(z[:3], z[3:], m_plus, m_minus, x0))

    def min_sep(x):
        return min(np.linalg.norm(x + x0), np.linalg.norm(x - x0))

    return System("two_centre", 3, energy, lambda y: y, grad_V, min_sep, max(r0, 1e-300))


def aux_system(x1, masses: MassParams):
    x1 = np.asarray(x1, dtype=float)
    mm, MM = masses.frak_m(2), masses.frak_M(2)
    k = masses.mu * masses.m1 * masses.m2

    def grad_V(x2):
        d = x2 - x1
        return mm * MM * x2 / np.linalg.norm(x2) ** 3 + k * d / np.linalg.norm(d) ** 3

    def energy(z):
        return aux_hamiltonian(AuxState(z[:3], z[3:], x1, masses))

    def min_sep(x2):
        return min(np.linalg.norm(x2), np.linalg.norm(x2 - x1))

    return System("aux", 3, energy, lambda y: y / mm, grad_V, min_sep,
                  max(float(np.linalg.norm(x1)), 1.0))


def three_body_system(masses: MassParams):
    m1, m2 = masses.frak_m(1), masses.frak_m(2)
    M1, M2 = masses.frak_M(1), masses.frak_M(2)
    k = masses.mu * masses.m1 * masses.m2
    c = masses.mu / masses.m0

    def grad_T(y):
        y1, y2 = y[:3], y[3:]
        return np.concatenate([y1 / m1 + c * y2, y2 / m2 + c * y1])

    def grad_V(x):
        x1, x2 = x[:3], x[3:]
        d = x1 - x2
        f = k * d / np.linalg.norm(d) ** 3
        return np.concatenate([m1 * M1 * x1 / np.linalg.norm(x1) ** 3 + f,
                               m2 * M2 * x2 / np.linalg.norm(x2) ** 3 - f])

    def energy(z):
        from .charts import CartesianPair
        from .integrals import three_body_cartesian
        return three_body_cartesian(CartesianPair(z[0:3], z[3:6], z[6:9], z[9:12]), masses)

    def min_sep(x):
        x1, x2 = x[:3], x[3:]
        return min(np.linalg.norm(x1), np.linalg.norm(x2), np.linalg.norm(x1 - x2))

    return System("three_body", 6, energy, grad_T, grad_V, min_sep, 1.0)


@dataclass
class FlowSpec:
    """What to integrate and how.

    ``state`` is the concatenation of impulses and positions.  ``t_eval``
    are the sample times (defaults to 101 equispaced points).
    """

    system: System
    state: np.ndarray
    t_span: tuple
    integrator: str = "dop853"
    tol: float = 1e-12
    t_eval: np.ndarray = None
    step: float = 1e-2

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=float)
        if not 1e-14 <= self.tol <= 1e-6:
            raise DomainError("tolerance must lie in [1e-14, 1e-6]")
        if not all(math.isfinite(t) for t in self.t_span):
            raise DomainError("time span must be finite")
        if self.integrator not in ("dop853", "yoshida4"):
            raise DomainError(f"unknown integrator {self.integrator!r}")
        if self.t_eval is None:
            self.t_eval = np.linspace(self.t_span[0], self.t_span[1], 101)


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    nfev: int = 0


def _vector_field(sys: System):
    d = sys.dim

    def rhs(_t, z):
        y, x = z[:d], z[d:]
        return np.concatenate([-sys.grad_V(x), sys.grad_T(y)])

    return rhs


def _collision_event(sys: System):
    limit = COLLISION_FRACTION * sys.scale

    def event(_t, z):
        return sys.min_separation(z[sys.dim:]) - limit

    event.terminal = True
    return event


def flow(spec: FlowSpec) -> Trajectory:
    """Integrate Hamilton's equations and sample at ``spec.t_eval``."""
    sys = spec.system
    if sys.min_separation(spec.state[sys.dim:]) <= COLLISION_FRACTION * sys.scale:
        raise DomainError("initial state is inside the collision set")
    if spec.integrator == "yoshida4":
        return _yoshida_flow(spec)
    sol = solve_ivp(_vector_field(sys), spec.t_span, spec.state, method="DOP853",
                    t_eval=spec.t_eval, rtol=spec.tol, atol=spec.tol * 1e-2,
                    events=_collision_event(sys), dense_output=False)
    if sol.status == 1 or not sol.success:
        last_t = float(sol.t_events[0][0]) if sol.t_events and len(sol.t_events[0]) else (
            float(sol.t[-1]) if sol.t.size else spec.t_span[0])
        last = (sol.y_events[0][0] if sol.y_events and len(sol.y_events[0])
                else (sol.y[:, -1] if sol.y.size else spec.state))
        raise CollisionApproachError(f"integration stopped near a collision at t = {last_t:.6g}"
                                     f" ({sol.message})", t=last_t, state=np.array(last))
    return Trajectory(t=sol.t, states=sol.y.T, nfev=sol.nfev)


YOSHIDA_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
YOSHIDA_W0 = 1.0 - 2.0 * YOSHIDA_W1


def _leapfrog(sys, y, x, h):
    y = y - 0.5 * h * sys.grad_V(x)
    x = x + h * sys.grad_T(y)
    y = y - 0.5 * h * sys.grad_V(x)
    return y, x


def _yoshida_flow(spec: FlowSpec) -> Trajectory:
    sys = spec.system
    d = sys.dim
    t0, t1 = spec.t_span
    direction = 1.0 if t1 >= t0 else -1.0
    y, x = spec.state[:d].copy(), spec.state[d:].copy()
    t = t0
    out = []
    nfev = 0
    limit = COLLISION_FRACTION * sys.scale
    for target in spec.t_eval:
        while direction * (target - t) > 1e-15 * max(1.0, abs(target)):
            h = direction * min(spec.step, abs(target - t))
            for w in (YOSHIDA_W1, YOSHIDA_W0, YOSHIDA_W1):
                y, x = _leapfrog(sys, y, x, w * h)
            nfev += 6
            t += h
            # a step longer than the distance to the nearest singularity is unresolved
            sep = sys.min_separation(x)
            if sep <= limit or abs(h) * np.linalg.norm(sys.grad_T(y)) > sep:
                raise CollisionApproachError(f"collision approach at t = {t:.6g}", t=t,
                                             state=np.concatenate([y, x]))
        out.append(np.concatenate([y, x]))
    return Trajectory(t=np.array(spec.t_eval, dtype=float), states=np.array(out), nfev=nfev)


# ---------------------------------------------------------------------------
# Conservation reports


@dataclass(frozen=True)
class ConservationReport:
    name: str
    initial: float
    max_drift: float
    relative_drift: float
    times: np.ndarray = field(repr=False)


def conservation_report(traj: Trajectory, integrals: dict, floor=1e-30):
    """Drift statistics of each named evaluator ``f(state) -> float``."""
    if traj.states.size == 0:
        raise DomainError("empty trajectory")
    reports = []
    for name, fn in integrals.items():
        vals = np.array([fn(z) for z in traj.states])
        drift = np.abs(vals - vals[0])
        mx = float(drift.max())
        reports.append(ConservationReport(name=name, initial=float(vals[0]), max_drift=mx,
                                          relative_drift=mx / max(abs(vals[0]), floor),
                                          times=traj.t))
    return reports


def two_centre_integrals(m_plus, m_minus, x0):
    def st(z):
        return TwoCentreState(z[:3], z[3:], m_plus, m_minus, x0)

    return {"E": lambda z: two_centre_energy(st(z)),
            "Theta": lambda z: two_centre_Theta(st(z)),
            "N": lambda z: two_centre_N(st(z))}


def aux_integrals(x1, masses):
    def st(z):
        return AuxState(z[:3], z[3:], x1, masses)

    return {"H_aux": lambda z: aux_hamiltonian(st(z)), "N_aux": lambda z: aux_N(st(z))}


def random_bounded_two_centre(rng, m_plus=1.0, m_minus=0.5, r0=0.5):
    """Random bound two-centre state kept well away from both centres.

    The particle starts at distance 2-3 from the origin with a speed below
    the local escape speed, and is redrawn until its energy is negative and
    its pericentre proxy ``|C|^2/(2 (m+ + m-))`` exceeds ``r0``.
    """
    x0 = np.array([0.0, 0.0, r0])
    while True:
        x = rng.normal(size=3)
        x *= rng.uniform(2.0, 3.0) / np.linalg.norm(x)
        v_esc = math.sqrt(2 * (m_plus + m_minus) / np.linalg.norm(x))
        y = rng.normal(size=3)
        y *= rng.uniform(0.4, 0.7) * v_esc / np.linalg.norm(y)
        s = TwoCentreState(y, x, m_plus, m_minus, x0)
        C = np.cross(x, y)
        if two_centre_energy(s) < 0 and np.dot(C, C) / (2 * (m_plus + m_minus)) > 2 * r0:
            return np.concatenate([y, x]), x0

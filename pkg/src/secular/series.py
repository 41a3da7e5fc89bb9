"""Taylor-Fourier analysis of the outer average and coefficient-level checks.

``expand_h1`` produces the coefficients ``c[n][m]`` of

    h1 = sum_n sum_m c[n][m] eps^n cos(m gamma2),   eps = r1/a2,

using the exact Legendre identity for the eps-Taylor coefficients
(``c_n(gamma2) = mean over zeta of rho^-n P_n(-s cos(gamma2 + nu)) / a2``)
followed by a discrete cosine transform in ``gamma2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

from .averaging import DEFAULT_NODES, PowerSeries, epsilon_project, periodic_nodes
from .elements import anomalies
from .errors import DomainError, PrecisionError, RegimeError
from .integrals import g_p
from .legendre import legendre_all

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TaylorFourierSeries:
    """Coefficients ``c[n][m]`` of ``sum c[n][m] eps^n cos(m gamma2)`` plus
    error estimates and the frozen parameters they were computed at."""

    c: np.ndarray
    err: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def N(self):
        return self.c.shape[0] - 1

    @property
    def M(self):
        return self.c.shape[1] - 1

    def __call__(self, eps, gamma2):
        m = np.arange(self.M + 1)
        row = self.c @ np.cos(m * gamma2)
        return float(np.polynomial.polynomial.polyval(eps, row))

    def with_entry(self, n, m, value):
        c = self.c.copy()
        c[n, m] = value
        return TaylorFourierSeries(c=c, err=self.err, params=dict(self.params))


def _taylor_rows(Lambda2, Gamma2, Theta, N, gammas, nodes):
    """c_n(gamma) for every gamma in ``gammas`` (without the 1/a2 factor)."""
    e = math.sqrt(max(0.0, 1.0 - (Gamma2 / Lambda2) ** 2))
    s = math.sqrt(max(0.0, 1.0 - (Theta / Gamma2) ** 2))
    zeta = periodic_nodes(nodes)
    nu, rho = anomalies(e, zeta)
    t = -s * np.cos(gammas[:, None] + nu[None, :])
    P = legendre_all(N, t)
    w = rho[None, None, :] ** -np.arange(N + 1)[:, None, None]
    return np.mean(P * w, axis=2)


def _cosine_coeffs(values):
    """Cosine coefficients of samples on gamma_k = k pi / K, k = 0..K."""
    K = values.shape[-1] - 1
    y = dct(values, type=1, axis=-1) / K
    y[..., 0] *= 0.5
    y[..., -1] *= 0.5
    return y


def expand_h1(Lambda2, Gamma2, Theta, a2, N=4, M=None, nodes=DEFAULT_NODES):
    """Taylor-Fourier coefficients of h1 up to eps^N and cos(M gamma2)."""
    M = N if M is None else M
    if N > 12 or M > N:
        raise DomainError("need N <= 12 and M <= N")
    K = N + 1
    gammas = np.pi * np.arange(K + 1) / K

    def coeffs(n_nodes):
        rows = _taylor_rows(Lambda2, Gamma2, Theta, N, gammas, n_nodes)
        return _cosine_coeffs(rows)[:, : M + 1] / a2

    c = coeffs(nodes)
    coarse = coeffs(nodes // 2)
    scale = np.maximum(np.max(np.abs(c), axis=1, keepdims=True), abs(c[0, 0]))
    err = np.abs(c - coarse) + 16 * EPS * scale * (np.arange(N + 1)[:, None] + 1)
    params = dict(Lambda2=Lambda2, Gamma2=Gamma2, Theta=Theta, a2=a2, nodes=nodes)
    return TaylorFourierSeries(c=c, err=err, params=params)


# ---------------------------------------------------------------------------
# Coefficient reports


@dataclass(frozen=True)
class CoefficientEntry:
    n: int
    m: int
    value: float
    error: float
    relative: float
    vanishes: bool


@dataclass(frozen=True)
class CoefficientReport:
    entries: tuple
    parity: tuple

    @property
    def all_vanish(self):
        return all(e.vanishes for e in self.entries) and all(e.vanishes for e in self.parity)

    def get(self, n, m):
        for e in self.entries + self.parity:
            if (e.n, e.m) == (n, m):
                return e
        raise KeyError((n, m))


def _entry(s, n, m):
    row_scale = max(float(np.max(np.abs(s.c[n]))), abs(float(s.c[0, 0])))
    value = float(s.c[n, m])
    error = float(s.err[n, m])
    return CoefficientEntry(n=n, m=m, value=value, error=error,
                            relative=abs(value) / row_scale, vanishes=abs(value) < 10 * error)


def harrington_report(s: TaylorFourierSeries) -> CoefficientReport:
    """Verdicts for the modes m >= max(1, n) and for the odd-parity modes.

    Row n = 1 of h1 is identically zero, so relative sizes are taken with
    respect to ``max(max_m |c[n][m]|, |c[0][0]|)``.
    """
    harr = tuple(_entry(s, n, m) for n in range(s.N + 1)
                 for m in range(max(1, n), s.M + 1))
    parity = tuple(_entry(s, n, m) for n in range(s.N + 1)
                   for m in range(s.M + 1) if (n - m) % 2)
    return CoefficientReport(entries=harr, parity=parity)


def printed_c20(Lambda2, Gamma2, Theta, a2):
    """-(1/4) Lambda2^3 (3 Theta^2 - Gamma2^2)/Gamma2^5 / a2."""
    return -0.25 * Lambda2**3 * (3 * Theta**2 - Gamma2**2) / Gamma2**5 / a2


def printed_c31(Lambda2, Gamma2, Theta, a2):
    """-(3/8) e2 s (Lambda2/Gamma2)^5 (1 - 5 Theta^2/Gamma2^2) / a2."""
    e = math.sqrt(1 - (Gamma2 / Lambda2) ** 2)
    s = math.sqrt(1 - (Theta / Gamma2) ** 2)
    return -3.0 / 8.0 * e * s * (Lambda2 / Gamma2) ** 5 * (1 - 5 * Theta**2 / Gamma2**2) / a2


# ---------------------------------------------------------------------------
# Commutation rules


def expand_h1_stencil(Lambda2, Gamma2, Theta, a2, N=4, M=None, nodes=DEFAULT_NODES, h_fd=1e-5):
    """Expansions at Gamma2 - h, Gamma2, Gamma2 + h (for Gamma-derivatives)."""
    return tuple(expand_h1(Lambda2, Gamma2 + k * h_fd, Theta, a2, N, M, nodes)
                 for k in (-1, 0, 1)), h_fd


def default_ab(Lambda2, Theta):
    """a(Gamma) = Gamma^2/Lambda2^2 and b(Gamma) = e(Gamma) sqrt(1 - Theta^2/Gamma^2).

    ``eps`` multiplies ``b`` in the integral, so ``b`` carries no r1/a2 factor.
    """
    def a(G):
        return (G / Lambda2) ** 2

    def b(G):
        return math.sqrt(max(0.0, 1 - (G / Lambda2) ** 2)) * math.sqrt(max(0.0, 1 - (Theta / G) ** 2))

    return a, b


def commutation_recursion_defect(stencil, a=None, b=None):
    """Largest residual of the commutation rules between h and a + eps b cos(gamma).

    For n <= N and 1 <= m <= M the residual is::

        m h_nm a' + (1/2)((m-1) h_{n-1,m-1} + (m+1) h_{n-1,m+1}) b'
          - (1/2)(h'_{n-1,m-1} - h'_{n-1,m+1} + h'_{n-1,0} [m == 1]) b

    with primes denoting Gamma-derivatives (central differences on the
    stencil) and ``h_{-1,m} = 0``, ``h_{n,M+1} = 0``.
    """
    (lo, mid, hi), h_fd = stencil
    p = mid.params
    G = p["Gamma2"]
    if a is None or b is None:
        a0, b0 = default_ab(p["Lambda2"], p["Theta"])
        a, b = a or a0, b or b0
    da = (a(G + h_fd) - a(G - h_fd)) / (2 * h_fd)
    db = (b(G + h_fd) - b(G - h_fd)) / (2 * h_fd)
    bv = b(G)
    N, M = mid.N, mid.M
    H = np.zeros((N + 2, M + 2))
    dH = np.zeros((N + 2, M + 2))
    H[1:, : M + 1] = mid.c
    dH[1:, : M + 1] = (hi.c - lo.c) / (2 * h_fd)
    worst = 0.0
    for n in range(N + 1):
        k = n + 1  # row of h_n in the padded arrays; row k-1 holds h_{n-1}
        for m in range(1, M + 1):
            lhs = (m * H[k, m] * da
                   + 0.5 * ((m - 1) * H[k - 1, m - 1] + (m + 1) * H[k - 1, m + 1]) * db)
            rhs = 0.5 * (dH[k - 1, m - 1] - dH[k - 1, m + 1]
                         + (dH[k - 1, 0] if m == 1 else 0.0)) * bv
            worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# Expansion of the energy representation in (E, I)


def _fd_weights_even(order):
    """Central second-difference stencil raised to ``order/2``: weights on
    offsets -k..k for the ``order``-th derivative with O(h^2) error."""
    w = np.array([1.0])
    for _ in range(order // 2):
        w = np.convolve(w, [1.0, -2.0, 1.0])
    return w


def _mixed_even_derivative(f, order_E, order_I, step):
    wE, wI = _fd_weights_even(order_E), _fd_weights_even(order_I)
    kE, kI = len(wE) // 2, len(wI) // 2
    total = 0.0
    for i, a in enumerate(wE):
        for j, b in enumerate(wI):
            total += a * b * f((i - kE) * step, (j - kI) * step)
    return total / step ** (order_E + order_I), float(np.sum(np.abs(np.outer(wE, wI))))


def g_hk_coefficients(r1, a2, h, k, p=0.5, nodes=DEFAULT_NODES, rel_tol=1e-3):
    """Coefficient of E^(2h) I^(2k) in ``g_p`` by central differences at (0, 0).

    The derivative ``d^2h_E d^2k_I g / ((2h)! (2k)!)`` uses steps
    ``delta = 1e-2/(h+k+1)`` and ``delta/2`` combined by Richardson
    extrapolation.  Raises ``PrecisionError`` when the estimated roundoff
    exceeds ``rel_tol`` times ``|g_00|``.
    """
    if h < 0 or k < 0 or h + k > 3:
        raise DomainError("need h, k >= 0 and h + k <= 3")

    def f(E, I):
        return g_p(r1, a2, E, I, p, nodes)

    g00 = f(0.0, 0.0)
    if h == k == 0:
        return g00
    step = 1e-2 / (h + k + 1)
    fact = math.factorial(2 * h) * math.factorial(2 * k)
    d1, wsum = _mixed_even_derivative(f, 2 * h, 2 * k, step)
    d2, _ = _mixed_even_derivative(f, 2 * h, 2 * k, step / 2)
    roundoff = 2 * EPS * abs(g00) * wsum / (step / 2) ** (2 * h + 2 * k) / fact
    if roundoff > rel_tol * abs(g00):
        raise PrecisionError(f"finite differences of order {2 * h + 2 * k} are unstable "
                             f"(roundoff {roundoff:.2e})")
    return (4 * d2 - d1) / 3 / fact


def b1_formula(r1, a2):
    """r1^2 a2^2 / (r1^2 + a2^2)^(5/2)."""
    return r1**2 * a2**2 / (r1**2 + a2**2) ** 2.5


RHO_REF = -0.75
SIGMA_REF = 0.75


@dataclass(frozen=True)
class HermanResult:
    """Quadratic coefficients of the energy representation.

    ``rho`` and ``sigma`` are extracted numerically by this toolkit; the
    reference values -3/4 and 3/4 are derived, not quoted.
    """

    rho: float
    sigma: float
    b1_measured: float
    b1_formula: float


def herman_constants(r1, a2, nodes=DEFAULT_NODES, reference=(1.0, 1.0)):
    """Extract rho = g_10/b1 and sigma = g_01/b1.

    ``b1_measured`` is the E^2 + I^2 response rescaled to agree with the
    formula at the ``reference`` point; it matches ``b1_formula`` elsewhere
    exactly when the coefficients have the claimed functional form.
    """
    if r1 <= 0 or a2 <= 0:
        raise DomainError("r1 and a2 must be positive")
    g10 = g_hk_coefficients(r1, a2, 1, 0, nodes=nodes)
    g01 = g_hk_coefficients(r1, a2, 0, 1, nodes=nodes)
    ref10 = g_hk_coefficients(*reference, 1, 0, nodes=nodes)
    ref01 = g_hk_coefficients(*reference, 0, 1, nodes=nodes)
    bf = b1_formula(r1, a2)
    measured = (g01 - g10) / (ref01 - ref10) * b1_formula(*reference)
    return HermanResult(rho=g10 / bf, sigma=g01 / bf, b1_measured=measured, b1_formula=bf)


# ---------------------------------------------------------------------------
# Mixed average in the quadratic regime


def _binomial_series(alpha, order, shift=0):
    """Coefficients of eps^shift (1 + eps^2)^alpha up to eps^order."""
    coeffs = np.zeros(order + 1)
    c = 1.0
    for k in range(0, (order - shift) // 2 + 1):
        coeffs[shift + 2 * k] = c
        c *= (alpha - k) / (k + 1)
    return PowerSeries(tuple(coeffs))


def beta_series(order=40):
    """Projected series beta0 = P[(1+eps^2)^(-1/2)], beta1 = P[eps^2 (1+eps^2)^(-5/2)]."""
    return (epsilon_project(_binomial_series(-0.5, order)),
            epsilon_project(_binomial_series(-2.5, order, shift=2)))


@dataclass(frozen=True)
class MixedCoeffs:
    beta0: float
    beta1: float
    h3: float
    prediction: float
    residual: float
    exponent: float


def mixed_average_prediction(r1, a2, e2, iota, rho=RHO_REF, sigma=SIGMA_REF, order=40):
    eps = r1 / a2
    b0, b1 = beta_series(order)
    beta0, beta1 = b0(eps), b1(eps)
    return beta0, beta1, (beta0 + rho * beta1 * e2**2
                          + sigma * beta1 * (1 - e2**2) * math.sin(iota) ** 2) / a2


def mixed_average_coeffs(r1, a2, e2, iota, g2=0.3, nodes2d=(128, 256), order=40,
                         min_exponent=3.5):
    """beta0, beta1 and the quadratic-form check of the mixed average.

    The inner direction is ``(0, sin iota, cos iota)`` and the outer
    perihelion ``(sin g2, -cos g2, 0)``.  The residual
    ``h3 - prediction`` is computed at ``(e2, iota)`` and at half those
    values; its scaling exponent must be at least ``min_exponent``
    (fourth order gives 4), otherwise ``RegimeError`` is raised.
    """
    from .averaging import mixed_average
    from .elements import OrbitGeometry

    def residual(e, inc):
        orbit = OrbitGeometry.from_elements(a2, e)
        N1 = np.array([0.0, math.sin(inc), math.cos(inc)])
        h3 = mixed_average(r1, N1, orbit, g2, nodes2d)
        b0, b1, pred = mixed_average_prediction(r1, a2, e, inc, order=order)
        return h3, pred, h3 - pred, b0, b1

    h3, pred, res, beta0, beta1 = residual(e2, iota)
    if e2 == 0 and iota == 0:
        return MixedCoeffs(beta0, beta1, h3, pred, res, math.inf)
    res_half = residual(e2 / 2, iota / 2)[2]
    if res == 0 or res_half == 0:
        exponent = math.inf
    else:
        exponent = math.log2(abs(res) / abs(res_half))
    if exponent < min_exponent:
        raise RegimeError(f"residual scales with exponent {exponent:.2f} < {min_exponent}",
                          exponent=exponent)
    return MixedCoeffs(beta0, beta1, h3, pred, res, exponent)

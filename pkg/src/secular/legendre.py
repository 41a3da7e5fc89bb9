"""Legendre polynomials and the identities built on them.

* ``legendre_eval``: three-term recurrence.
* ``delta``: the averaging constants, zero for odd n and
  ``(-1)^m (2m-1)!!/(2m)!!`` for n = 2m.
* ``averaging_identity_defect``: the circle average of
  ``P_n(sqrt(1-t^2) cos theta)`` equals ``delta_n P_n(t)``.
* ``even_derivative``: closed forms of the tau-derivatives of
  ``P_2m(sqrt(tau))`` at tau = 0 and tau = 1.
* ``cbar_table`` / ``chat_table``: two recursions producing the same
  triangular table of integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .errors import DomainError

MAX_DEGREE = 64


def double_factorial(n):
    """n!! for n >= -1, with (-1)!! = 0!! = 1, computed in floating point."""
    if n < -1:
        raise DomainError("double factorial needs n >= -1")
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def delta(n):
    """Averaging constant: 0 for odd n, (-1)^m (2m-1)!!/(2m)!! for n = 2m."""
    if n < 0:
        raise DomainError("degree must be non-negative")
    if n % 2:
        return 0.0
    m = n // 2
    return (-1) ** m * double_factorial(2 * m - 1) / double_factorial(2 * m)


def legendre_all(nmax, t):
    """Array ``[P_0(t), ..., P_nmax(t)]``; ``t`` may be an array (extra leading axis)."""
    t = np.asarray(t, dtype=float)
    out = np.empty((nmax + 1,) + t.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = t
    for n in range(1, nmax):
        out[n + 1] = ((2 * n + 1) * t * out[n] - n * out[n - 1]) / (n + 1)
    return out


def legendre_eval(n, t):
    """P_n(t) by the three-term recurrence, for 0 <= n <= 64 and |t| <= 1."""
    if not 0 <= n <= MAX_DEGREE:
        raise DomainError(f"degree must lie in [0, {MAX_DEGREE}]")
    if np.any(np.abs(np.asarray(t)) > 1.0):
        raise DomainError("argument must satisfy |t| <= 1")
    val = legendre_all(n, t)[n]
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class LegendreTable:
    """Values of P_0..P_N at one point together with the delta sequence."""

    N: int
    t: float
    values: tuple
    deltas: tuple

    @classmethod
    def build(cls, N, t):
        if abs(t) > 1:
            raise DomainError("argument must satisfy |t| <= 1")
        vals = tuple(float(v) for v in legendre_all(N, t))
        return cls(N=N, t=float(t), values=vals, deltas=tuple(delta(n) for n in range(N + 1)))


def averaging_identity_defect(n, t, nodes=None):
    """Compare the circle average of P_n(sqrt(1-t^2) cos theta) with delta_n P_n(t).

    Returns ``(lhs, rhs, defect)``.  The periodic trapezoid rule with
    ``nodes >= 4(n+1)`` points integrates the polynomial integrand exactly.
    """
    if nodes is None:
        nodes = 8 * (n + 1)
    if nodes < 4 * (n + 1):
        raise DomainError("need nodes >= 4(n+1)")
    if abs(t) > 1:
        raise DomainError("argument must satisfy |t| <= 1")
    theta = 2 * np.pi * np.arange(nodes) / nodes
    lhs = float(np.mean(legendre_eval(n, math.sqrt(1.0 - t * t) * np.cos(theta))))
    rhs = delta(n) * legendre_eval(n, t)
    return lhs, rhs, abs(lhs - rhs)


def even_derivative(m, h, at):
    """h-th derivative of P_2m(t) in tau = t^2, at tau = 0 or tau = 1.

    At tau = 0::

        (-1)^(m-h) h!/(2h)! (2m+2h-1)!!/(2m-2h)!!

    At tau = 1::

        2^-h (2m+2h-1)!!/(2m-1)!! (2m)!!/((2h)!! (2m-2h)!!)
    """
    if h < 0 or m < 0:
        raise DomainError("m and h must be non-negative")
    if h > m:
        raise DomainError("need h <= m")
    df = double_factorial
    if at == 0:
        return ((-1) ** (m - h) * math.factorial(h) / math.factorial(2 * h)
                * df(2 * m + 2 * h - 1) / df(2 * m - 2 * h))
    if at == 1:
        return (df(2 * m + 2 * h - 1) / df(2 * m - 1)
                * df(2 * m) / (df(2 * h) * df(2 * m - 2 * h)) / 2**h)
    raise DomainError("at must be 0 or 1")


def _recursion(H, step):
    table = np.zeros((H + 1, H + 2))
    table[0, 0] = 1.0
    for h in range(H):
        for j in range(h + 2):
            prev = table[h, j - 1] if j >= 1 else 0.0
            table[h + 1, j] = step(h, j, prev, table[h, j])
    return table[:, : H + 1]


def cbar_table(H):
    """Triangular table from c[h+1][j] = -(2j-1) c[h][j-1] + (2h-j) c[h][j]."""
    if H > 30:
        raise DomainError("H must be <= 30")
    return _recursion(H, lambda h, j, a, b: -(2 * j - 1) * a + (2 * h - j) * b)


def chat_table(H):
    """Table from the twin recursion
    c[h+1][j] = -(j(2j-1)/(h+1)) c[h][j-1] + ((4h^2 - j^2 + 2h - j)/(2h+2)) c[h][j]."""
    if H > 30:
        raise DomainError("H must be <= 30")
    return _recursion(H, lambda h, j, a, b: (-(j * (2 * j - 1) / (h + 1)) * a
                                             + ((4 * h * h - j * j + 2 * h - j) / (2 * h + 2)) * b))


def cap_c(n, j):
    """C_{n,j} = (n-j+1)(n-j+2)...(n+j)/(2j)!."""
    num = 1.0
    for k in range(n - j + 1, n + j + 1):
        num *= k
    return num / math.factorial(2 * j)


def z_derivative_from_table(m, h, table=None):
    """h-th z-derivative of P_2m(sqrt(1-2z)) at z = 0 as sum_j C_{2m,j} cbar[h][j]."""
    table = cbar_table(max(h, 1)) if table is None else table
    return float(sum(cap_c(2 * m, j) * table[h][j] for j in range(h + 1)))

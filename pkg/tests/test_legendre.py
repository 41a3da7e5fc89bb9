import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import legendre as npleg

from secular import legendre as lg
from secular.errors import DomainError


def poly_in_tau(m):
    """Coefficients of P_2m(sqrt(tau)) in powers of tau, from numpy's Legendre basis."""
    coeffs = npleg.leg2poly([0] * (2 * m) + [1])
    return coeffs[::2]


def test_recurrence_examples():
    assert lg.legendre_eval(0, 0.3) == 1.0
    assert lg.legendre_eval(3, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert lg.legendre_eval(2, 0.0) == pytest.approx(-0.5, abs=1e-16)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 64), st.floats(-1.0, 1.0))
def test_recurrence_matches_numpy(n, t):
    ref = npleg.legval(t, [0] * n + [1])
    got = lg.legendre_eval(n, t)
    assert got == pytest.approx(ref, abs=1e-12)
    assert abs(got) <= 1 + 1e-12


def test_legendre_domain():
    with pytest.raises(DomainError):
        lg.legendre_eval(2, 1.5)
    with pytest.raises(DomainError):
        lg.legendre_eval(65, 0.1)


def test_table():
    tab = lg.LegendreTable.build(10, 1.0)
    assert all(v == pytest.approx(1.0) for v in tab.values)
    for m in range(6):
        d = (-1) ** m * lg.double_factorial(2 * m - 1) / lg.double_factorial(2 * m)
        assert tab.deltas[2 * m] == pytest.approx(d)
    assert all(tab.deltas[n] == 0.0 for n in range(1, 11, 2))


def test_double_factorial():
    assert lg.double_factorial(-1) == 1.0
    assert lg.double_factorial(0) == 1.0
    assert lg.double_factorial(7) == 105.0
    assert lg.double_factorial(8) == 384.0


def test_averaging_identity_examples():
    lhs, _, _ = lg.averaging_identity_defect(3, 0.37)
    assert abs(lhs) < 1e-12
    _, rhs, _ = lg.averaging_identity_defect(2, 1.0)
    assert rhs == pytest.approx(-0.5)
    _, rhs, _ = lg.averaging_identity_defect(4, 0.0)
    assert rhs == pytest.approx(9 / 64)


def test_averaging_identity_sweep():
    ts = [0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 1.0, -1.0]
    for n in range(31):
        for t in ts:
            assert lg.averaging_identity_defect(n, t, 8 * (n + 1))[2] < 1e-10


def test_averaging_identity_needs_nodes():
    with pytest.raises(DomainError):
        lg.averaging_identity_defect(10, 0.2, nodes=40)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 20), st.floats(-1.0, 1.0))
def test_averaging_identity_property(n, t):
    assert lg.averaging_identity_defect(n, t)[2] < 1e-12


def test_even_derivative_examples():
    assert lg.even_derivative(1, 0, 0) == pytest.approx(-0.5)
    # D_tau (3 tau - 1)/2 = 3/2
    assert lg.even_derivative(1, 1, 0) == pytest.approx(1.5)
    assert lg.even_derivative(2, 0, 1) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        lg.even_derivative(1, 2, 0)


@pytest.mark.parametrize("m", range(7))
def test_even_derivative_against_polynomial(m):
    c = poly_in_tau(m)
    for h in range(m + 1):
        at0 = math.factorial(h) * c[h]
        at1 = sum(math.factorial(k) / math.factorial(k - h) * c[k] for k in range(h, m + 1))
        assert lg.even_derivative(m, h, 0) == pytest.approx(at0, rel=1e-12)
        assert lg.even_derivative(m, h, 1) == pytest.approx(at1, rel=1e-12)


@pytest.mark.parametrize("m", range(1, 7))
def test_even_derivative_from_sampled_values(m):
    # P_2m(sqrt(tau)) has degree m in tau, so m+1 samples of legendre_eval determine
    # it; the interpolating polynomial then gives every derivative
    tau = np.linspace(0.0, 1.0, m + 1)
    vals = [lg.legendre_eval(2 * m, math.sqrt(x)) for x in tau]
    poly = np.polynomial.Polynomial.fit(tau, vals, m, domain=[0, 1], window=[0, 1])
    for h in range(m + 1):
        d = poly.deriv(h) if h else poly
        for at in (0, 1):
            assert d(at) == pytest.approx(lg.even_derivative(m, h, at), rel=1e-6, abs=1e-9)


def test_twin_tables():
    a, b = lg.cbar_table(12), lg.chat_table(12)
    assert a[0, 0] == 1.0
    assert list(a[1, :2]) == [0.0, -1.0]
    nz = a != 0
    assert np.max(np.abs(a[nz] - b[nz]) / np.abs(a[nz])) < 1e-12
    assert np.all(b[~nz] == 0)
    assert np.all(np.triu(a, 1) == 0)


def test_table_limit():
    with pytest.raises(DomainError):
        lg.cbar_table(31)


def test_z_derivative_example():
    # P_2(sqrt(1 - 2z)) = 1 - 3z
    assert lg.z_derivative_from_table(1, 1) == pytest.approx(-3.0)
    assert lg.cap_c(2, 1) == pytest.approx(3.0)


@pytest.mark.parametrize("m", range(7))
def test_z_derivatives_match_closed_form(m):
    for h in range(m + 1):
        assert lg.z_derivative_from_table(m, h) == pytest.approx(
            (-2.0) ** h * lg.even_derivative(m, h, 1), rel=1e-12)


@pytest.mark.parametrize("t", [-0.9, -0.3, 0.0, 0.4, 1.0])
def test_generating_function_convergence(t):
    eps = 0.3
    exact = 1 / math.sqrt(1 - 2 * eps * t + eps * eps)
    P = lg.legendre_all(40, t)
    errors = [abs(exact - sum(P[n] * eps**n for n in range(N + 1))) for N in range(40)]
    assert errors[-1] < 1e-15 * 1e3
    # mean contraction per term over ten terms
    rate = (errors[20] / errors[10]) ** 0.1
    assert rate == pytest.approx(eps, rel=0.1)

import math
import threading

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from permcycles import (
    EULER_GAMMA,
    I_integral,
    RangeError,
    corollary1_estimate,
    exact_count,
    harmonic,
    poisson_local_prob_log,
    rho,
    rho_alladi,
    solve_xi,
    theorem3_estimate,
)
from permcycles import dickman as dickman_mod

from oracles import rho3_quadrature, rho_power_series

ALLADI_C = 0.1


@pytest.fixture(scope="module")
def rho_oracle():
    return rho_power_series(50)


def test_rho_is_one_on_unit_interval():
    for u in np.linspace(0.0, 1.0, 11):
        assert rho(u).log_rho == 0.0


def test_rho_analytic_segment():
    assert abs(rho(2.0).rho - (1.0 - math.log(2.0))) <= 1e-12
    for u in np.linspace(1.0, 2.0, 17):
        assert abs(rho(u).rho - (1.0 - math.log(u))) <= 1e-12


def test_rho3_against_quadrature():
    ref = rho3_quadrature()
    assert abs(rho(3.0).rho / ref - 1.0) <= 1e-10


@pytest.mark.parametrize("u", [2.5, 3.7, 5.0, 7.25, 10.0, 17.5, 25.0, 33.3, 49.9])
def test_rho_against_power_series_oracle(rho_oracle, u):
    ref = float(rho_oracle(u))
    assert abs(rho(u).log_rho - math.log(ref)) <= 1e-10


@pytest.mark.parametrize("u", [2, 5, 10, 20, 50])
def test_rho_below_reciprocal_gamma(u):
    assert rho(u).log_rho <= -math.lgamma(u + 1.0)


def test_rho_monotone_decreasing():
    us = np.linspace(1.0005, 500.0, 1000)
    vals = [rho(u).log_rho for u in us]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_delay_equation_residual():
    rng = np.random.default_rng(7)
    h = 1e-5
    for u in rng.uniform(1.01, 49.99, 100):
        lo = rho(u - 1.0).log_rho
        deriv = (math.exp(rho(u + h).log_rho - lo) - math.exp(rho(u - h).log_rho - lo)) / (2 * h)
        # u rho'(u) + rho(u-1), divided by rho(u-1)
        assert abs(u * deriv + 1.0) <= 1e-6


def test_rho_far_tail_is_finite():
    ctx = rho(500.0)
    assert math.isfinite(ctx.log_rho) and ctx.log_rho < -2500
    with pytest.raises(RangeError):
        rho(500.5)
    with pytest.raises(RangeError):
        rho(-0.1)


def test_concurrent_table_growth():
    table = dickman_mod._DickmanTable()
    out = {}

    def worker(i):
        out[i] = table.log_rho(40.0 + i)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for i, val in out.items():
        assert val == rho(40.0 + i).log_rho


@pytest.mark.parametrize("u", [1 + 1e-6, 1.5, 2.0, math.e, 10.0, 100.0, 1e4, 1e8])
def test_xi_bracket_and_derivative(u):
    xv = solve_xi(u)
    assert math.log(u) < xv.xi <= 2 * math.log(u)
    assert math.exp(xv.xi) == pytest.approx(1 + u * xv.xi, rel=1e-13)
    with mpmath.workdps(40):
        um = mpmath.mpf(u)
        # x - log(1 + u x) is negative on (0, xi) and positive beyond
        ref = mpmath.findroot(
            lambda x: x - mpmath.log1p(um * x), (mpmath.log(um), 2 * mpmath.log(um)), solver="anderson"
        )
        ref_prime = ref / (um * (ref - 1 + 1 / um))
    assert xv.xi == pytest.approx(float(ref), rel=1e-13)
    assert xv.xi_prime == pytest.approx(float(ref_prime), rel=1e-12)
    h = u * 1e-6
    fd = (solve_xi(u + h).xi - solve_xi(u - h).xi) / (2 * h) if u - h >= 1 else None
    if fd is not None:
        assert xv.xi_prime == pytest.approx(fd, rel=1e-5)


def test_xi_at_one():
    xv = solve_xi(1.0)
    assert xv.xi == 0.0 and xv.xi_prime == 2.0
    assert solve_xi(1 + 1e-9).xi_prime == pytest.approx(2.0, rel=1e-6)
    with pytest.raises(RangeError):
        solve_xi(0.5)


@pytest.mark.parametrize("s", [-60.0, -5.0, -1.0, -0.3, 0.2, 1.0, 4.0, 25.0])
def test_I_integral_against_quadrature(s):
    ref, _ = quad(lambda v: math.expm1(v) / v, 0.0, s, epsabs=1e-14, epsrel=1e-13)
    assert I_integral(s) == pytest.approx(ref, rel=1e-12, abs=1e-14)
    assert I_integral(0.0) == 0.0


def test_euler_gamma_constant():
    m = 10_000
    est = harmonic(m) - math.log(m) - 1 / (2 * m) + 1 / (12 * m * m)
    assert abs(est - EULER_GAMMA) <= 1e-14


def test_alladi_error_decreasing_and_order_one_over_u():
    us = [2, 3, 5, 10, 20, 50, 100, 200, 400]
    errs = [abs(math.expm1(rho_alladi(u).log_rho - rho(u).log_rho)) for u in us]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    for u, e in zip([1.0] + us, [abs(math.expm1(rho_alladi(1.0).log_rho))] + errs):
        assert e <= ALLADI_C / u


def test_theorem3_examples():
    # u = 1: rho = 1 and the exact value is -H_r
    est = theorem3_estimate(100, 100)
    assert est == pytest.approx(-EULER_GAMMA - math.log(100), abs=1e-15)
    assert abs(math.expm1(est + harmonic(100))) <= math.log(2) / 100
    for n, r in [(10_000, 5000), (10_000, 500)]:
        err = abs(math.expm1(theorem3_estimate(n, r) - poisson_local_prob_log(n, r)))
        assert err <= 5 * n * math.log(n / r + 1) / r**2


def test_theorem3_beyond_table_uses_alladi():
    n, r = 10**6, 1000
    expected = -EULER_GAMMA - math.log(r) + rho_alladi(n / r).log_rho
    assert theorem3_estimate(n, r) == expected


def test_corollary1_forms_differ_by_sqrt_u_xi_prime():
    # the two displayed forms differ by exactly sqrt(u xi') times the Alladi factor
    for n, r in [(10_000, 1000), (10_000, 200), (10**6, 1000)]:
        u = n / r
        xv = solve_xi(u)
        lhs = corollary1_estimate(n, r)
        rhs = -EULER_GAMMA - math.log(r) + rho_alladi(u).log_rho - 0.5 * math.log(u * xv.xi_prime)
        assert lhs == pytest.approx(rhs, abs=1e-11)
        gap = lhs - theorem3_estimate(n, r)
        assert abs(gap + 0.5 * math.log(u * xv.xi_prime)) <= ALLADI_C / u


def test_corollary1_examples():
    n, r = 900, 300
    exact = exact_count(n, r).log_prob
    err = abs(math.expm1(corollary1_estimate(n, r) - exact))
    assert err <= 5 * (n * math.log(n / r) / r**2 + r / n)
    assert math.isfinite(corollary1_estimate(4, 2))
    with pytest.raises(RangeError):
        corollary1_estimate(10, 10)
    with pytest.raises(RangeError):
        corollary1_estimate(10, 1)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1.0, max_value=1e12, allow_nan=False))
def test_xi_root_property(u):
    xv = solve_xi(u)
    if u > 1:
        assert math.log(u) < xv.xi <= 2 * math.log(u)
        # psi(xi) = u - 1 with psi(x) = (e^x - 1 - x)/x
        assert dickman_mod._psi(xv.xi)[0] == pytest.approx(u - 1, rel=1e-12)

"""Acceptance checks.

Each test prints one line ``PASS`` or ``FAIL`` with the measured worst case,
its tolerance and the wall time against the budget, then asserts. Tolerances
and budgets are pinned below; none is adjusted to make a check pass.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from permcycles import (
    brute_force_count,
    build_coeff_table,
    coefficient_oracle,
    d_table_exact,
    exact_count,
    nu_log,
    poisson_local_prob_log,
    q_decomposition_check,
    rho,
    solve_saddle,
    theorem2_estimate,
    theorem3_estimate,
    x_expansion,
)

from oracles import involutions, lagrange_family_by_iteration, rho3_quadrature, rho_power_series

ORACLE_TOL = 1e-10
CALIBRATED_B = 5.0
EXPANSION_B = 50.0
RHO2_TOL = 1e-12
RHO3_RTOL = 1e-10
DDE_RTOL = 1e-6
SADDLE_RESIDUAL_RTOL = 1e-12
LAMBDA_RTOL = 1e-9
DECOMPOSITION_TOL = 1e-9
SERIES_TOL = 1e-10


class Check:
    """Collects the worst ratio ``measured / tolerance`` over a criterion."""

    def __init__(self):
        self.worst = 0.0
        self.where = ""
        self.failures = []

    def le(self, measured, tol, where):
        ratio = measured / tol if tol > 0 else (0.0 if measured == 0 else math.inf)
        if not math.isfinite(measured) or ratio > 1.0:
            self.failures.append(f"{where}: {measured:.3g} > {tol:.3g}")
        if ratio >= self.worst:
            self.worst, self.where = ratio, f"{where}: {measured:.3g} vs {tol:.3g}"

    def true(self, cond, where):
        if not cond:
            self.failures.append(where)


def report(capsys, number, title, check, started, budget):
    elapsed = time.perf_counter() - started
    if elapsed > budget:
        check.failures.append(f"runtime {elapsed:.2f}s > {budget}s")
    status = "PASS" if not check.failures else "FAIL"
    detail = check.where or "exact match"
    line = f"{status} [{number:2d}] {title}: worst {detail}; {elapsed:.2f}s of {budget}s"
    if check.failures:
        line += " | " + "; ".join(check.failures[:5])
    with capsys.disabled():
        print("\n" + line)
    assert not check.failures, line


def test_involution_counts(capsys):
    t0 = time.perf_counter()
    c = Check()
    ref = involutions(20)
    c.true(ref[1:8] == [1, 2, 4, 10, 26, 76, 232], "oracle sequence head")
    for n in range(1, 21):
        c.true(exact_count(n, min(2, n)).count == ref[n], f"n={n}")
    report(capsys, 1, "cycles <= 2 reproduce the involution numbers, n = 1..20", c, t0, 1.0)


def test_brute_force_equivalence(capsys):
    t0 = time.perf_counter()
    c = Check()
    pairs = [(n, r) for n in range(1, 9) for r in range(1, n + 1)]
    c.true(len(pairs) == 36, "pair count")
    for n, r in pairs:
        c.true(exact_count(n, r).count == brute_force_count(n, r), f"n={n} r={r}")
    report(capsys, 2, "big-integer count equals permutation enumeration, 36 pairs n <= 8", c, t0, 10.0)


def test_oracle_equivalence(capsys):
    t0 = time.perf_counter()
    c = Check()
    for n in (50, 500, 2000):
        for r in sorted({2, 5, math.ceil(math.sqrt(n)), n}):
            fl = nu_log(n, r)
            c.le(abs(fl - exact_count(n, r).log_nu), ORACLE_TOL, f"bigint n={n} r={r}")
            c.le(abs(fl - coefficient_oracle(n, r)), ORACLE_TOL, f"series n={n} r={r}")
    report(capsys, 3, "float recurrence vs big-integer count and multiprecision series", c, t0, 30.0)


def _moser_wyman_log(n):
    return 0.5 * n * math.log(n) - 0.5 * math.log(2) - n / 2 + math.sqrt(n) - 0.25


def test_small_r_closed_forms(capsys):
    t0 = time.perf_counter()
    c = Check()
    c.true(d_table_exact(2) == [Fraction(-1, 2), Fraction(1), Fraction(-1, 4)], "d-table r=2")
    c.true(
        d_table_exact(3) == [Fraction(-2, 3), Fraction(1, 2), Fraction(5, 6), Fraction(-5, 18)],
        "d-table r=3",
    )
    n = 10**4
    exact = nu_log(n, 2) + math.lgamma(n + 1)
    c.le(abs(math.expm1(exact - _moser_wyman_log(n))), CALIBRATED_B * n**-0.5, f"involution asymptotic n={n}")
    # error times n^(1/2) must stay bounded as n grows
    for m in (10**3, 10**4, 10**5):
        err = abs(math.expm1(nu_log(m, 2) + math.lgamma(m + 1) - _moser_wyman_log(m)))
        c.le(err * math.sqrt(m), CALIBRATED_B, f"rate product n={m}")
    report(capsys, 4, "exact d-tables r=2,3 and the involution asymptotic", c, t0, 5.0)


def test_saddle_estimate_accuracy(capsys):
    t0 = time.perf_counter()
    c = Check()
    n = 5000
    for r in (10, 50, 100):
        err = abs(math.expm1(theorem2_estimate(n, r) - poisson_local_prob_log(n, r)))
        c.le(err, CALIBRATED_B * r / n, f"n={n} r={r}")
    for r in (10, 50, 100):
        for m in (1000, 5000, 20_000):
            err = abs(math.expm1(theorem2_estimate(m, r) - poisson_local_prob_log(m, r)))
            c.le(err * m / r, CALIBRATED_B, f"rate product n={m} r={r}")
    report(capsys, 5, "saddle-point estimate within 5 r/n", c, t0, 10.0)


def test_dickman_estimate_accuracy(capsys):
    t0 = time.perf_counter()
    c = Check()
    n = 10**4
    for r in (500, 1000, 2500, 5000, 10**4):
        err = abs(math.expm1(theorem3_estimate(n, r) - poisson_local_prob_log(n, r)))
        c.le(err, CALIBRATED_B * n * math.log(n / r + 1) / r**2, f"n={n} r={r}")
    for frac in (20, 4, 1):
        for m in (2500, 10**4, 40_000):
            r = m // frac
            err = abs(math.expm1(theorem3_estimate(m, r) - poisson_local_prob_log(m, r)))
            c.le(err * r**2 / (m * math.log(m / r + 1)), CALIBRATED_B, f"rate product n={m} r={r}")
    report(capsys, 6, "Dickman estimate within 5 n log(n/r+1)/r^2", c, t0, 60.0)


def test_dickman_function(capsys):
    t0 = time.perf_counter()
    c = Check()
    for u in np.linspace(0.0, 1.0, 21):
        c.true(rho(u).rho == 1.0, f"rho({u:.2f}) != 1")
    c.le(abs(rho(2.0).rho - (1.0 - math.log(2.0))), RHO2_TOL, "rho(2)")
    c.le(abs(rho(3.0).rho / rho3_quadrature() - 1.0), RHO3_RTOL, "rho(3) vs quadrature")
    series_rho = rho_power_series(3)
    c.le(abs(rho(3.0).rho / float(series_rho(3.0)) - 1.0), RHO3_RTOL, "rho(3) vs 40-digit series")
    rng = np.random.default_rng(2024)
    h = 1e-5
    for u in rng.uniform(1.01, 49.99, 100):
        lo = rho(u - 1.0).log_rho
        deriv = (math.exp(rho(u + h).log_rho - lo) - math.exp(rho(u - h).log_rho - lo)) / (2 * h)
        c.le(abs(u * deriv + 1.0), DDE_RTOL, f"delay residual u={u:.3f}")
    report(capsys, 7, "Dickman function values and delay-equation residual", c, t0, 10.0)


def test_saddle_identities(capsys):
    t0 = time.perf_counter()
    c = Check()
    for n in (10, 100, 1000, 10**4, 10**5):
        rules = {1, 2, 3, math.ceil(math.log(n)), math.ceil(math.sqrt(n)), math.ceil(n / 2), n}
        for r in sorted(rules):
            s = solve_saddle(n, r)
            u = n / r
            power_sum = math.fsum(np.exp(np.arange(1, r + 1) * s.log_x))
            c.le(abs(power_sum - n) / n, SADDLE_RESIDUAL_RTOL, f"residual n={n} r={r}")
            if u > 1:
                c.true(u ** (1 / r) * (1 - 1e-14) <= s.x <= u ** (2 / (r + 1)) * (1 + 1e-14), f"bracket n={n} r={r}")
            if s.x > 1 + 1e-6:
                closed = r * r * u + r * (s.x - u) / (s.x - 1)
                c.le(abs(s.lambda2 - closed) / s.lambda2, LAMBDA_RTOL, f"lambda n={n} r={r}")
            c.le(q_decomposition_check(n, r), DECOMPOSITION_TOL, f"log Q split n={n} r={r}")
    report(capsys, 8, "saddle residual, bracket, lambda identity, log Q split on the stress grid", c, t0, 5.0)


def test_series_oracle(capsys):
    t0 = time.perf_counter()
    c = Check()
    N = 40
    for r in (2, 3, 5, 8):
        g, b, h, lam = lagrange_family_by_iteration(r, N)
        t = build_coeff_table(r, N)

        def close(a, ref, where):
            c.le(abs(a - ref) / max(1.0, abs(ref)), SERIES_TOL, where)

        for k in range(N + 1):
            close(t.g[k], g[k], f"g r={r} N={k}")
            close(t.Lambda[k], lam[k], f"Lambda r={r} N={k}")
        for k in range(1, N + 1):
            close(t.b[k], b[k], f"b r={r} N={k}")
        for k in range(-r, N + 1):
            close(t.h_at(k), h[k], f"h r={r} N={k}")
    report(capsys, 9, "coefficient families vs truncated power-series iteration", c, t0, 5.0)


def test_saddle_expansion(capsys):
    t0 = time.perf_counter()
    c = Check()
    for n, r in ((10**6, 2), (10**8, 3), (10**6, 5)):
        c.le(abs(x_expansion(n, r) - solve_saddle(n, r).x), EXPANSION_B / n, f"n={n} r={r}")
    for r, ns in ((2, (10**4, 10**6, 10**8)), (3, (10**6, 10**8, 10**10)), (5, (10**6, 10**8, 10**10))):
        for n in ns:
            c.le(abs(x_expansion(n, r) - solve_saddle(n, r).x) * n, EXPANSION_B, f"rate product n={n} r={r}")
    report(capsys, 10, "saddle-point expansion within 50/n", c, t0, 1.0)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(pytest.main([__file__, "-v"]))

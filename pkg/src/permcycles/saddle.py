"""Saddle point of ``exp(sum_{j<=r} z^j/j) / z^(n+1)`` and the resulting estimate.

The saddle ``x`` is the positive root of ``sum_{j=1}^r x^j = n``. Everything
here works with ``t = log x`` rather than ``x`` itself: when ``r`` is large
``x`` sits within ``O(1/r)`` of 1, and a double ``x`` cannot resolve the
equation to better than about ``r`` ulp, whereas ``x^j = exp(j t)`` keeps full
relative precision.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import zeta

from ._validation import check_int, check_n_r, check_tol
from .dickman import I_integral
from .exceptions import ConvergenceError, RangeError

__all__ = [
    "SaddleSolution",
    "solve_saddle",
    "lambda_k",
    "log_Q",
    "theorem2_estimate",
    "T_function",
    "q_decomposition_check",
]

DEFAULT_TOL = 1e-13
_MAXITER = 200

_ZETA_EVEN = zeta(2.0 * np.arange(1, 65))  # zeta(2k), k = 1..64


@dataclass(frozen=True)
class SaddleSolution:
    n: int
    r: int
    u: float
    x: float
    log_x: float
    residual: float
    lambdas: tuple
    log_Q: float

    @property
    def lambda2(self):
        return self.lambdas[1]


def _powers(t, r):
    j = np.arange(1, r + 1, dtype=np.float64)
    return j, j * t


def _log_x(x, log_x):
    if log_x is not None:
        return float(log_x)
    if not x > 0:
        raise RangeError(f"x must be positive, got {x}")
    return math.log(x)


def lambda_k(x, r, k, log_x=None):
    """``lambda_k = sum_{j=1}^r j^(k-1) x^j`` for ``k`` in 1..4.

    Pass ``log_x`` when it is known more accurately than ``log(x)``.
    At ``x = 1`` the closed-form power sums are returned.
    """
    r = check_int(r, "r")
    k = check_int(k, "k")
    if not 1 <= k <= 4:
        raise RangeError(f"k must lie in [1, 4], got {k}")
    t = _log_x(x, log_x)
    if t == 0.0:
        s1 = r * (r + 1) // 2
        return float((r, s1, r * (r + 1) * (2 * r + 1) // 6, s1 * s1)[k - 1])
    j, jt = _powers(t, r)
    return math.fsum(j ** (k - 1) * np.exp(jt))


def log_Q(x, n, r, log_x=None):
    """``log Q(x) = -n log x + sum_{j=1}^r (x^j - 1)/j``."""
    n = check_int(n, "n")
    r = check_int(r, "r")
    t = _log_x(x, log_x)
    if t == 0.0:
        return 0.0
    j, jt = _powers(t, r)
    return math.fsum(np.append(np.expm1(jt) / j, -n * t))


def _solve_log_saddle(n, r, tol):
    """Safeguarded Newton for ``t`` with ``sum_j (e^(j t) - 1) = n - r``."""
    u = n / r
    target = float(n - r)
    log_u = math.log(u)
    lo = log_u / r * (1.0 - 1e-12)
    hi = 2.0 * log_u / (r + 1) * (1.0 + 1e-12)
    j = np.arange(1, r + 1, dtype=np.float64)
    t = min(max(log_u / r, math.log1p(log_u / r)), hi)
    f = math.inf
    for _ in range(_MAXITER):
        jt = j * t
        f = math.fsum(np.expm1(jt)) - target
        if abs(f) <= tol * n:
            return t, abs(f) / n
        if f > 0:
            hi = min(hi, t)
        else:
            lo = max(lo, t)
        fprime = math.fsum(j * np.exp(jt))
        t_new = t - f / fprime
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        if t_new == t:
            break
        t = t_new
    raise ConvergenceError(
        f"saddle equation for n={n}, r={r} did not reach tol={tol:g}",
        last_iterate=math.exp(t),
        residual=abs(f) / n,
    )


def solve_saddle(n, r, tol=DEFAULT_TOL):
    """Solve ``sum_{j=1}^r x^j = n`` for ``x >= 1`` and collect derived quantities.

    Newton's method in ``t = log x`` (``f' = lambda_2``), started at
    ``max(log u / r, log(1 + log u / r))`` inside the bracket
    ``u^(1/r) <= x <= u^(2/(r+1))``; an iterate that leaves the bracket is
    replaced by bisection. ``f`` is convex and increasing, so convergence is
    guaranteed.
    """
    n, r = check_n_r(n, r)
    tol = check_tol(tol)
    u = n / r
    if r == n:
        t, residual = 0.0, 0.0
    elif r == 1:
        t, residual = math.log(n), 0.0
    else:
        t, residual = _solve_log_saddle(n, r, tol)
    x = float(n) if r == 1 else math.exp(t)
    lambdas = tuple(lambda_k(x, r, k, log_x=t) for k in range(1, 5))
    return SaddleSolution(
        n=n,
        r=r,
        u=u,
        x=x,
        log_x=t,
        residual=residual,
        lambdas=lambdas,
        log_Q=log_Q(x, n, r, log_x=t),
    )


def theorem2_estimate(n, r, tol=DEFAULT_TOL):
    """``log P(l_r(Z) = n) ~ log Q(x) - log(2 pi lambda_2)/2``, relative error ``O(r/n)``."""
    sol = solve_saddle(n, r, tol=tol)
    return sol.log_Q - 0.5 * math.log(2.0 * math.pi * sol.lambda2)


def _gauss_legendre_01(m):
    nodes, weights = leggauss(m)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def T_function(z, r):
    """``T(z) = int_0^z (e^t - 1)/t * (b(t/r) - 1) dt`` with ``b(v) = v/(1 - e^-v)``.

    Evaluated through the Bernoulli expansion of ``b``::

        T(z) = (e^z - z - 1)/(2r)
               + sum_k 2 (-1)^(k+1) zeta(2k)/(2 pi r)^(2k) * int_0^z (e^t - 1) t^(2k-1) dt

    Each moment is written as ``z^(2k) int_0^1 (e^(z s) - 1) s^(2k-1) ds`` and
    integrated by Gauss-Legendre. Requires ``|Re z|, |Im z| <= pi r`` so the
    series ratio stays below 1/2.
    """
    r = check_int(r, "r")
    if r < 1:
        raise RangeError(f"r must be >= 1, got {r}")
    zc = complex(z)
    bound = math.pi * r
    if abs(zc.real) > bound or abs(zc.imag) > bound:
        raise RangeError(f"T(z) needs |Re z|, |Im z| <= pi*r = {bound:g}, got {z!r}")
    is_real = not isinstance(z, complex)
    if zc == 0:
        return 0.0 if is_real else 0j

    s, w = _gauss_legendre_01(80 + int(2 * abs(zc)))
    em1 = np.expm1(zc * s)
    ratio2 = (zc / (2.0 * math.pi * r)) ** 2
    terms = [(np.expm1(zc) - zc) / (2.0 * r)]
    scale = 1.0 + 0j  # (z / (2 pi r))^(2k)
    for k in range(1, len(_ZETA_EVEN) + 1):
        scale *= ratio2
        moment = np.dot(w, em1 * s ** (2 * k - 1))
        sign = 1.0 if k % 2 else -1.0
        term = 2.0 * sign * _ZETA_EVEN[k - 1] * scale * moment
        terms.append(term)
        if abs(term) < 1e-18 * abs(terms[0] + term):
            break
    re = math.fsum(complex(t).real for t in terms)
    if is_real:
        return re
    return complex(re, math.fsum(complex(t).imag for t in terms))


def _T_quadrature(z, r, panel=1.0, nodes=32):
    """``T(z)`` for real ``z`` by composite Gauss-Legendre on the defining integral.

    Used where ``z`` lies outside the Bernoulli series domain; the integrand
    is smooth on the whole real line.
    """
    z = float(z)
    if z == 0.0:
        return 0.0
    npanel = max(1, math.ceil(abs(z) / panel))
    s, w = _gauss_legendre_01(nodes)
    edges = np.linspace(0.0, z, npanel + 1)
    h = np.diff(edges)
    t = (edges[:-1, None] + h[:, None] * s[None, :]).ravel()
    wt = (h[:, None] * w[None, :]).ravel()
    v = t / r
    bern = v / -np.expm1(-v)
    vals = np.expm1(t) / t * (bern - 1.0)
    return math.fsum(wt * vals)


def q_decomposition_check(n, r, tol=DEFAULT_TOL):
    """Defect of ``log Q(x) = -u r log x + I(r log x) + T(r log x)``.

    The ``-n log x`` term is common to both sides and cancels exactly, so
    the defect is measured between ``sum_j (x^j - 1)/j`` and ``I + T``. ``T`` is
    taken from the Bernoulli series inside its domain and from direct
    quadrature of its integral outside it (small ``r``, large ``n``).
    """
    sol = solve_saddle(n, r, tol=tol)
    if sol.log_x == 0.0:
        return 0.0
    z = r * sol.log_x
    j, jt = _powers(sol.log_x, r)
    power_part = math.fsum(np.expm1(jt) / j)
    if abs(z) <= math.pi * r:
        t_val = T_function(z, r)
    else:
        t_val = _T_quadrature(z, r)
    return abs(power_part - (I_integral(z) + t_val))

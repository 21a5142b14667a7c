"""Lagrange-Buermann coefficients for the small-``r`` regime.

All families come from the implicit series ``y = y(z)`` defined by
``y = z * ((1 - y^r)/(1 - y))^(1/r)``; with ``z = n^(-1/r)`` one has
``y = 1/x`` where ``x`` is the saddle point. The coefficients are

* ``g_N``      of ``z / y(z)`` (and ``g_N^(j)`` of its ``j``-th power),
* ``b_N``      of ``log(z / y(z))``,
* ``h_N``      of ``sum_{j<=r} 1/(j y^j)`` (a Laurent series from ``z^-r``),
* ``Lambda_N`` of ``(z^r sum_{j<=r} j / y^j)^-1``,
* ``d_{r,N}``  the exponent coefficients of the closed-form count.
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammasgn

from ._validation import check_int
from .exceptions import RangeError, RangeWarning

__all__ = [
    "CoeffTable",
    "gen_binom",
    "phi_power_coeff",
    "g_coeff",
    "b_coeff",
    "build_coeff_table",
    "d_coeff",
    "d_table_exact",
    "x_expansion",
    "theorem1_estimate",
]


def gen_binom(a, k):
    """Generalized binomial coefficient ``C(a, k)`` for integer ``k >= 0``.

    Exact when ``a`` is an int or :class:`~fractions.Fraction` (a Fraction is
    returned); otherwise evaluated in floating point via log-gamma.
    """
    if k < 0:
        return 0
    if isinstance(a, (int, Fraction)):
        out = Fraction(1)
        for i in range(k):
            out = out * (a - i) / (i + 1)
        return out
    if k == 0:
        return 1.0
    if float(a).is_integer():
        out = 1.0
        for i in range(k):
            out *= (a - i) / (i + 1)
        return out
    sign = gammasgn(a + 1.0) * gammasgn(a - k + 1.0)
    return float(sign) * math.exp(
        math.lgamma(a + 1.0) - math.lgamma(k + 1.0) - math.lgamma(a - k + 1.0)
    )


def _phi_exact(r, alpha, N):
    total = Fraction(0)
    for l in range(N // r + 1):
        m = N - r * l
        total += (-1) ** l * gen_binom(alpha, l) * gen_binom(m - 1 + alpha, m)
    return total


def phi_power_coeff(r, alpha, N):
    """``[y^N] ((1 - y^r)/(1 - y))^alpha``.

    Expanding ``(1 - y^r)^alpha (1 - y)^-alpha`` gives the double sum
    ``sum_{r l + m = N} C(alpha, l) (-1)^l C(m - 1 + alpha, m)``. Its terms
    grow like ``2^N`` while the result decays, so for rational ``alpha`` (an
    int or Fraction, which covers every coefficient family here) the sum is
    done exactly and rounded once. A float ``alpha`` uses compensated
    floating-point summation and is only reliable for moderate ``N``.
    """
    r = check_int(r, "r")
    N = check_int(N, "N")
    if N < 0:
        raise RangeError(f"N must be >= 0, got {N}")
    if isinstance(alpha, (int, Fraction)):
        return float(_phi_exact(r, alpha, N))
    terms = []
    for l in range(N // r + 1):
        m = N - r * l
        terms.append((-1) ** l * gen_binom(alpha, l) * gen_binom(m - 1 + alpha, m))
    return math.fsum(terms)


def g_coeff(r, j, N):
    """``[z^N] (z / y(z))^j``."""
    r, j, N = check_int(r, "r"), check_int(j, "j"), check_int(N, "N")
    if j < 1 or N < 0:
        raise RangeError(f"need j >= 1 and N >= 0, got j={j}, N={N}")
    if N == j:
        return (1.0 if j % r == 0 else 0.0) - 1.0 / r
    return float(Fraction(j, j - N) * _phi_exact(r, Fraction(N - j, r), N))


def b_coeff(r, N, method="auto"):
    """``[z^N] log(z / y(z))``.

    For ``N < r`` the double sum has a single term and reduces to
    ``-Gamma(N + N/r) / (N Gamma(N+1) Gamma(N/r))``; ``b_r = 0``. ``method="sum"``
    forces the general double-sum route for cross-checking.
    """
    r, N = check_int(r, "r"), check_int(N, "N")
    if N < 1:
        raise RangeError(f"N must be >= 1, got {N}")
    if method not in ("auto", "sum"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        if N < r:
            a = N / r
            return -math.exp(
                math.lgamma(N + a) - math.log(N) - math.lgamma(N + 1.0) - math.lgamma(a)
            )
        if N == r:
            return 0.0
    return float(-_phi_exact(r, Fraction(N, r), N) / N)


def d_coeff(r, N):
    """Exponent coefficient ``d_{r,N}`` of ``n^((r-N)/r)`` in the small-``r`` count formula."""
    r, N = check_int(r, "r"), check_int(N, "N")
    if r < 2:
        raise RangeError(f"r must be >= 2, got {r}")
    if not 0 <= N <= r:
        raise RangeError(f"N must lie in [0, r={r}], got {N}")
    if N == 0:
        return -1.0 + 1.0 / r
    if N == r:
        return -math.fsum(1.0 / j for j in range(2, r + 1)) / r
    a = N / r
    return math.exp(
        math.lgamma(N + a) - math.log(r - N) - math.lgamma(N + 1.0) - math.lgamma(1.0 + a)
    )


def d_table_exact(r):
    """``d_{r,0..r}`` as exact fractions.

    ``Gamma(N + N/r) / Gamma(1 + N/r) = prod_{i=1}^{N-1} (i + N/r)`` is rational,
    so every entry is.
    """
    r = check_int(r, "r")
    if r < 2:
        raise RangeError(f"r must be >= 2, got {r}")
    out = [Fraction(1, r) - 1]
    for N in range(1, r):
        a = Fraction(N, r)
        ratio = Fraction(1)
        for i in range(1, N):
            ratio *= i + a
        out.append(ratio / ((r - N) * math.factorial(N)))
    out.append(-sum(Fraction(1, j) for j in range(2, r + 1)) / r)
    return out


@dataclass(frozen=True)
class CoeffTable:
    """Coefficient families for one ``r``.

    ``g[N]`` and ``Lambda[N]`` for ``0 <= N <= Nmax``; ``b[N]`` for
    ``0 <= N <= Nmax`` (``b[0] = 0``); ``h[N + r]`` holds ``h_N`` for
    ``-r <= N <= Nmax``; ``d[N]`` for ``0 <= N <= r``.
    """

    r: int
    Nmax: int
    g: np.ndarray
    b: np.ndarray
    h: np.ndarray
    Lambda: np.ndarray
    d: np.ndarray

    def h_at(self, N):
        if not -self.r <= N <= self.Nmax:
            raise RangeError(f"h_N stored for {-self.r} <= N <= {self.Nmax}, got {N}")
        return float(self.h[N + self.r])


def build_coeff_table(r, Nmax=None):
    r = check_int(r, "r")
    if r < 2:
        raise RangeError(f"r must be >= 2, got {r}")
    Nmax = 4 * r if Nmax is None else check_int(Nmax, "Nmax")
    if Nmax < r:
        raise RangeError(f"Nmax must be >= r={r}, got {Nmax}")

    g = np.array([g_coeff(r, 1, N) for N in range(Nmax + 1)])
    b_ext = np.zeros(Nmax + r + 1)
    for N in range(1, Nmax + r + 1):
        b_ext[N] = b_coeff(r, N)

    h = np.empty(Nmax + r + 1)
    h[0] = 1.0 / r
    for N in range(-r + 1, Nmax + 1):
        if N == 0:
            h[r] = -math.fsum(1.0 / j for j in range(2, r + 1)) / r
        else:
            h[N + r] = (N + r) / N * b_ext[N + r]

    N_idx = np.arange(Nmax + 1)
    lam = -N_idx * b_ext[: Nmax + 1] / r
    lam[0] = 1.0 / r
    d = np.array([d_coeff(r, N) for N in range(r + 1)])
    return CoeffTable(r=r, Nmax=Nmax, g=g, b=b_ext[: Nmax + 1].copy(), h=h, Lambda=lam, d=d)


def x_expansion(n, r):
    """Expansion of the saddle point in powers of ``n^(-1/r)``, error ``O(1/n)``.

    ``x = n^(1/r) - 1/r - sum_{N=2}^r c_N n^(-(N-1)/r) + n^(-1+1/r)/r`` with
    ``c_N = Gamma(N + (N-1)/r) / ((N-1) Gamma(N+1) Gamma((N-1)/r))``.
    Proven for ``2 <= r <= log n``; outside that a :class:`RangeWarning` is issued.
    """
    n, r = check_int(n, "n"), check_int(r, "r")
    if r < 2 or n < 1:
        raise RangeError(f"x_expansion needs r >= 2 and n >= 1, got n={n}, r={r}")
    if r > math.log(n):
        warnings.warn(f"r={r} > log n={math.log(n):.3f}: outside the proven range", RangeWarning, stacklevel=2)
    terms = [n ** (1.0 / r), -1.0 / r, n ** (-1.0 + 1.0 / r) / r]
    for N in range(2, r + 1):
        a = (N - 1) / r
        c = math.exp(math.lgamma(N + a) - math.log(N - 1) - math.lgamma(N + 1.0) - math.lgamma(a))
        terms.append(-c * n ** (-a))
    return math.fsum(terms)


def theorem1_estimate(n, r):
    """``log(n! nu(n, r))`` for small ``r``, relative error ``O(n^(-1/r))``.

    ``-log(r)/2 + n (1 - 1/r) log n + sum_{N=0}^r d_{r,N} n^((r-N)/r)``. Proven for
    ``2 <= r <= log n``; larger ``r`` up to ``max(2, ceil(log n))`` is accepted
    silently, beyond that a :class:`RangeWarning` is issued.
    """
    n, r = check_int(n, "n"), check_int(r, "r")
    if r < 2 or r > n:
        raise RangeError(f"theorem1_estimate needs 2 <= r <= n, got n={n}, r={r}")
    if r > max(2, math.ceil(math.log(n))):
        warnings.warn(f"r={r} > ceil(log n): outside the proven range", RangeWarning, stacklevel=2)
    terms = [-0.5 * math.log(r), n * (1.0 - 1.0 / r) * math.log(n)]
    terms.extend(d_coeff(r, N) * n ** ((r - N) / r) for N in range(r + 1))
    return math.fsum(terms)

"""Exact and ground-truth values of the cycle-bounded permutation probability.

``nu(n, r)`` is the probability that a uniform random permutation of ``n``
elements has no cycle longer than ``r``. Three independent routes are
provided so they can check each other:

* :func:`exact_count` -- big-integer count ``n! * nu(n, r)``;
* :func:`nu_log` -- double-precision recurrence for ``log nu(n, r)`` with
  rescaling, usable up to ``n = 10**6``;
* :func:`coefficient_oracle` -- the ``n``-th Taylor coefficient of
  ``exp(sum_{j<=r} z**j / j)`` in multiprecision arithmetic.

:func:`brute_force_count` enumerates permutations outright for tiny ``n``.
"""

import functools
import itertools
import math
from collections import deque
from dataclasses import dataclass

import mpmath
import numpy as np

from ._validation import check_int, check_n_r
from .exceptions import ConfigError, RangeError, ResourceError

__all__ = [
    "LogValue",
    "CycleBoundCount",
    "harmonic",
    "exact_count",
    "brute_force_count",
    "nu_log",
    "poisson_local_prob_log",
    "coefficient_oracle",
    "BIGINT_MAX_N",
    "FLOAT_MAX_N",
]

BIGINT_MAX_N = 2000
FLOAT_MAX_N = 10**6
BRUTE_FORCE_MAX_N = 10

# rescale threshold for the float recurrence; 2**-600 leaves ample room
# below before subnormals and above for the window maximum after scaling
_RESCALE_BELOW = 2.0**-600
# window length above which nu_log sums through block totals
_BLOCKED_ABOVE = 1024


@dataclass(frozen=True)
class LogValue:
    """A nonnegative real stored as the natural log of its magnitude.

    ``log == -inf`` encodes zero. Products and quotients add/subtract logs;
    sums use log-sum-exp.
    """

    log: float

    @classmethod
    def from_value(cls, x):
        if x < 0:
            raise RangeError("LogValue holds nonnegative magnitudes only")
        return cls(math.log(x) if x > 0 else -math.inf)

    @property
    def is_zero(self):
        return self.log == -math.inf

    def value(self):
        return math.exp(self.log)

    def __float__(self):
        return float(self.log)

    def __mul__(self, other):
        return LogValue(self.log + _as_log(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_log(other)
        if other == -math.inf:
            raise ZeroDivisionError("division by a zero LogValue")
        return LogValue(self.log - other)

    def __add__(self, other):
        return LogValue(float(np.logaddexp(self.log, _as_log(other))))

    __radd__ = __add__


def _as_log(other):
    if isinstance(other, LogValue):
        return other.log
    return LogValue.from_value(other).log


@functools.lru_cache(maxsize=256)
def harmonic(r):
    """Harmonic number ``H_r = sum_{j=1}^r 1/j`` (compensated sum)."""
    r = check_int(r, "r")
    if r < 0:
        raise RangeError(f"r must be >= 0, got {r}")
    return math.fsum(1.0 / j for j in range(1, r + 1))


@dataclass(frozen=True)
class CycleBoundCount:
    """Number of permutations of ``n`` elements whose cycles all have length <= ``r``."""

    n: int
    r: int
    count: int

    @property
    def log_nu(self):
        """``log(count / n!)`` evaluated from the two exact integers."""
        return math.log(self.count) - math.log(math.factorial(self.n))

    @property
    def log_prob(self):
        """Log of the Poisson local probability, ``log nu - H_r``."""
        return self.log_nu - harmonic(self.r)


def exact_count(n, r, max_n=BIGINT_MAX_N):
    """Exact ``n! * nu(n, r)`` via the big-integer recurrence.

    ``a(m) = sum_{j=1}^{min(r, m)} (m-1)!/(m-j)! * a(m-j)`` with ``a(0) = 1``,
    evaluated in Horner form so the falling-factorial weights are built by
    one small-integer multiplication per term. Only the last ``r`` values
    are kept.

    >>> exact_count(4, 2).count
    10
    """
    n, r = check_n_r(n, r, max_n)
    if r == n:
        return CycleBoundCount(n, r, math.factorial(n))
    window = deque([1], maxlen=r)
    for m in range(1, n + 1):
        it = iter(window)
        acc = next(it)
        j = len(window)
        for val in it:
            j -= 1
            acc = val + (m - j) * acc
        window.append(acc)
    return CycleBoundCount(n, r, window[-1])


def brute_force_count(n, r):
    """Count permutations of ``n`` elements with all cycles <= ``r`` by enumeration."""
    n = check_int(n, "n")
    r = check_int(r, "r")
    if n > BRUTE_FORCE_MAX_N:
        raise RangeError(f"brute force refused for n={n} > {BRUTE_FORCE_MAX_N}")
    if n < 0 or r < 1:
        raise RangeError(f"need n >= 0 and r >= 1, got n={n}, r={r}")
    total = 0
    for perm in itertools.permutations(range(n)):
        visited = [False] * n
        ok = True
        for start in range(n):
            if visited[start]:
                continue
            length = 0
            i = start
            while not visited[i]:
                visited[i] = True
                i = perm[i]
                length += 1
            if length > r:
                ok = False
                break
        total += ok
    return total


def nu_log(n, r, max_n=FLOAT_MAX_N):
    """``log nu(n, r)`` from the double-precision recurrence.

    ``nu(m) = (1/m) * sum_{j=1}^{min(r, m)} nu(m - j)``, ``nu(0) = 1``.
    The active window is rescaled by an exact power of two whenever the
    newest value drops below ``2**-600``, so nothing underflows. The
    accumulated relative error stays within ``n * 8`` ulp.

    For ``r`` up to ``_BLOCKED_ABOVE`` each window is summed directly,
    ``O(n r)`` time. Beyond that the window sum is assembled from stored sums of
    completed blocks of about ``sqrt(r)`` entries, ``O(n sqrt(r))`` time. All
    terms are positive in both routes; a running sum would instead subtract
    the outgoing term and lose digits once ``nu`` has decayed.
    """
    n, r = check_n_r(n, r, max_n)
    if r == n:
        return 0.0
    try:
        vals = np.empty(n + 1, dtype=np.float64)
    except MemoryError as exc:  # pragma: no cover - depends on the host
        raise ResourceError(f"cannot allocate workspace for n={n}") from exc
    vals[0] = 1.0
    if r > _BLOCKED_ABOVE:
        return _nu_log_blocked(vals, n, r, math.isqrt(r))
    log_scale = 0.0  # true nu(m) = vals[m] * exp(log_scale)
    for m in range(1, n + 1):
        lo = m - r if m > r else 0
        v = vals[lo:m].sum() / m
        vals[m] = v
        if v < _RESCALE_BELOW:
            start = m - r + 1 if m - r + 1 > 0 else 0
            window = vals[start : m + 1]
            _, e = math.frexp(window.max())
            window *= 2.0**-e
            log_scale += e * math.log(2.0)
    return math.log(vals[n]) + log_scale


def _nu_log_blocked(vals, n, r, B):
    # blocks[k] = sum(vals[k*B:(k+1)*B]), filled once the block is complete
    blocks = np.zeros(n // B + 1)
    log_scale = 0.0
    for m in range(1, n + 1):
        lo = m - r if m > r else 0
        first = -(-lo // B)  # first block starting at or after lo
        last = m // B  # blocks below this index are complete
        if first >= last:
            s = vals[lo:m].sum()
        else:
            s = vals[lo : first * B].sum() + blocks[first:last].sum() + vals[last * B : m].sum()
        v = s / m
        vals[m] = v
        if (m + 1) % B == 0:
            blocks[m // B] = vals[m + 1 - B : m + 1].sum()
        if v < _RESCALE_BELOW:
            # rescale whole blocks so stored block sums stay consistent
            b0 = max(m - r + 1, 0) // B
            window = vals[b0 * B : m + 1]
            _, e = math.frexp(window.max())
            window *= 2.0**-e
            blocks[b0 : (m + 1) // B] *= 2.0**-e
            log_scale += e * math.log(2.0)
    return math.log(vals[n]) + log_scale


def poisson_local_prob_log(n, r, max_n=FLOAT_MAX_N):
    """``log P(l_r(Z) = n)`` for independent Poisson ``Z_j`` with mean ``1/j``.

    Equals ``log nu(n, r) - H_r``.
    """
    return nu_log(n, r, max_n=max_n) - harmonic(r)


def coefficient_oracle(n, r, digits=30):
    """``log [z^n] exp(sum_{j<=r} z**j / j)`` in ``digits``-digit arithmetic.

    The series exponential is expanded through its log-derivative: if
    ``F = exp(G)`` then ``m c_m = sum_k k g_k c_{m-k}``. Independent of
    :func:`nu_log` in both arithmetic and code path.
    """
    n = check_int(n, "n")
    r = check_int(r, "r")
    digits = check_int(digits, "digits")
    if not 15 <= digits <= 50:
        raise ConfigError(f"digits must lie in [15, 50], got {digits}")
    if not 0 <= n <= 5000:
        raise RangeError(f"coefficient_oracle needs 0 <= n <= 5000, got {n}")
    if r < 1:
        raise RangeError(f"r must be >= 1, got {r}")
    with mpmath.workdps(digits):
        g = [mpmath.mpf(0)] + [mpmath.mpf(1) / k for k in range(1, min(r, n) + 1)]
        coeffs = _series_exp(g, n)
        return float(mpmath.log(coeffs[n]))


def _series_exp(g, n):
    """Taylor coefficients ``c_0..c_n`` of ``exp(G)`` for ``G = sum g_k z^k`` (``g_0 = 0``)."""
    kg = [k * gk for k, gk in enumerate(g)]
    c = [mpmath.mpf(1)]
    for m in range(1, n + 1):
        kmax = min(m, len(kg) - 1)
        s = mpmath.fdot(kg[1 : kmax + 1], c[m - kmax : m][::-1])
        c.append(s / m)
    return c

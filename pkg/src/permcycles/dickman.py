"""Dickman function, the companion root ``xi(u)``, and the large-``r`` estimates.

The Dickman function is the continuous solution of ``u rho'(u) + rho(u-1) = 0``
with ``rho = 1`` on ``[0, 1]``. It is tabulated here one unit interval at a
time, from the equivalent integral form ``u rho(u) = int_{u-1}^{u} rho(t) dt``.
The integrand is positive, so no step involves a cancelling subtraction and
relative accuracy is preserved out to ``u = 500`` where ``rho`` is far below
the double range. Values are stored and returned in log space.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.special import exp1

from ._validation import check_n_r
from .exceptions import ConvergenceError, RangeError

__all__ = [
    "EULER_GAMMA",
    "XiValue",
    "DickmanContext",
    "solve_xi",
    "I_integral",
    "rho",
    "rho_alladi",
    "theorem3_estimate",
    "corollary1_estimate",
    "prebuild_table",
    "RHO_MAX_U",
]

EULER_GAMMA = 0.57721566490153286061
RHO_MAX_U = 500
I_MAX_ABS = 300.0

# polynomial degree per unit interval. Per-interval errors add up in log rho;
# degree 16 drifts to ~2e-8 by u = 500, degree 32 stays near 5e-11
_CHEB_DEGREE = 32
_FIXED_POINT_RTOL = 1e-14
_FIXED_POINT_MAXITER = 200


@dataclass(frozen=True)
class XiValue:
    u: float
    xi: float
    xi_prime: float


@dataclass(frozen=True)
class DickmanContext:
    u: float
    log_rho: float
    I_xi: float
    method: str

    @property
    def rho(self):
        return math.exp(self.log_rho)


def _psi(xi):
    """``(e^xi - 1 - xi) / xi`` and its derivative, accurate near zero."""
    if abs(xi) < 0.5:
        # val = sum_{k>=1} xi^k/(k+1)!,  der = sum_{k>=1} k xi^(k-1)/(k+1)!
        val = der = 0.0
        lower = 1.0  # xi^(k-1)
        fact = 1.0
        for k in range(1, 30):
            fact *= k + 1
            der += k * lower / fact
            lower *= xi
            val += lower / fact
            if abs(lower / fact) < 1e-18 * abs(val):
                break
        return val, der
    em1 = math.expm1(xi)
    val = (em1 - xi) / xi
    der = (xi * (em1 + 1.0) - em1) / (xi * xi)
    return val, der


def solve_xi(u, tol=1e-15):
    """Root ``xi > 0`` of ``e^xi = 1 + u xi`` (``xi(1) = 0``) and its derivative in ``u``.

    Newton's method is applied to ``(e^xi - 1)/xi = u`` written in the
    cancellation-free form ``psi(xi) = u - 1``. ``psi`` is increasing and
    convex, so iterates started right of the root decrease monotonically.
    The seed ``log u + log log(u + 2)`` is capped at the upper bound
    ``2 log u``.
    """
    u = float(u)
    if not u >= 1.0:
        raise RangeError(f"xi(u) requires u >= 1, got {u}")
    if u == 1.0:
        return XiValue(u, 0.0, 2.0)
    target = u - 1.0
    upper = 2.0 * math.log(u)
    xi = min(math.log(u) + math.log(math.log(u + 2.0)), upper)
    for _ in range(200):
        val, der = _psi(xi)
        step = (val - target) / der
        xi_new = xi - step
        if xi_new <= 0.0:
            xi_new = 0.5 * xi
        if abs(xi_new - xi) <= tol * xi_new:
            xi = xi_new
            break
        xi = xi_new
    else:
        raise ConvergenceError(f"xi({u}) did not converge", last_iterate=xi)
    xi_prime = xi / (u * xi - target)
    return XiValue(u, xi, xi_prime)


def I_integral(s):
    """``I(s) = int_0^s (e^v - 1)/v dv``.

    Summed as ``sum_{k>=1} s^k / (k k!)`` for ``s > -1``; for ``s <= -1``
    the alternating series cancels badly and the identity
    ``I(-a) = -(E1(a) + gamma + log a)`` is used instead.
    """
    s = float(s)
    if abs(s) > I_MAX_ABS:
        raise RangeError(f"|s| must be <= {I_MAX_ABS:g}, got {s}")
    if s == 0.0:
        return 0.0
    if s <= -1.0:
        a = -s
        return -(float(exp1(a)) + EULER_GAMMA + math.log(a))
    terms = []
    power = 1.0  # s**k / k!
    k = 0
    while True:
        k += 1
        power *= s / k
        t = power / k
        terms.append(t)
        if k > abs(s) and abs(t) < 1e-17 * abs(terms[0]):
            break
    return math.fsum(terms)


class _DickmanTable:
    """Per-unit-interval Chebyshev representation of the Dickman function.

    Interval ``k`` covers ``[k, k+1]`` and stores Chebyshev coefficients of
    ``rho(u)/rho(k)`` together with ``log rho(k)``. The table only grows, under
    a lock, and entries are never modified once written.
    """

    def __init__(self, degree=_CHEB_DEGREE):
        self.degree = degree
        i = np.arange(degree + 1)
        self.nodes = np.cos(np.pi * (i + 0.5) / (degree + 1))[::-1]
        self._vinv = np.linalg.inv(C.chebvander(self.nodes, degree))
        # interval 0: rho == 1 on [0, 1]
        const = np.zeros(degree + 1)
        const[0] = 1.0
        self.coeffs = [const]
        self.antideriv = [self._antiderivative(const)]
        self.log_rho_at = [0.0, 0.0]  # log rho(0), log rho(1)
        self._lock = threading.Lock()

    def _antiderivative(self, coeffs):
        # int_{k}^{u} in the u variable; ds = 2 du
        return 0.5 * C.chebint(coeffs, lbnd=-1)

    def ensure(self, kmax):
        if kmax < len(self.coeffs):
            return
        with self._lock:
            while len(self.coeffs) <= kmax:
                self._build_next()

    def _build_next(self):
        k = len(self.coeffs)
        prev_int = self.antideriv[k - 1]
        prev_total = C.chebval(1.0, prev_int)
        # rho(k-1) / rho(k); q_{k-1}(k) = rho(k)/rho(k-1)
        ratio = 1.0 / C.chebval(1.0, self.coeffs[k - 1])
        u = k + 0.5 * (self.nodes + 1.0)
        tail = ratio * (prev_total - C.chebval(self.nodes, prev_int))
        vals = np.ones_like(u)
        for _ in range(_FIXED_POINT_MAXITER):
            coeffs = self._vinv @ vals
            head = C.chebval(self.nodes, self._antiderivative(coeffs))
            new = (tail + head) / u
            diff = np.max(np.abs(new - vals) / np.abs(new))
            vals = new
            if diff < _FIXED_POINT_RTOL:
                break
        else:
            raise ConvergenceError(
                f"Dickman interval [{k}, {k + 1}] did not converge", residual=diff
            )
        coeffs = self._vinv @ vals
        # readers test len(self.coeffs) without the lock, so publish it last
        self.antideriv.append(self._antiderivative(coeffs))
        self.log_rho_at.append(self.log_rho_at[k] + math.log(C.chebval(1.0, coeffs)))
        self.coeffs.append(coeffs)

    def log_rho(self, u):
        if u <= 1.0:
            return 0.0
        k = math.ceil(u) - 1
        self.ensure(k)
        s = 2.0 * (u - k) - 1.0
        return self.log_rho_at[k] + math.log(C.chebval(s, self.coeffs[k]))


_TABLE = _DickmanTable()


def prebuild_table(u_max):
    """Build the shared rho table out to ``min(u_max, 500)`` ahead of concurrent use."""
    u_max = min(float(u_max), RHO_MAX_U)
    if u_max > 1.0:
        _TABLE.ensure(math.ceil(u_max) - 1)


def rho(u):
    """Dickman function at ``0 <= u <= 500``, returned in log space."""
    u = float(u)
    if not 0.0 <= u <= RHO_MAX_U:
        raise RangeError(f"rho(u) is tabulated for 0 <= u <= {RHO_MAX_U}, got {u}")
    log_rho = _TABLE.log_rho(u)
    I_xi = I_integral(solve_xi(u).xi) if u >= 1.0 else math.nan
    return DickmanContext(u, log_rho, I_xi, "piecewise_dde")


def rho_alladi(u):
    """Saddle-point (Alladi) approximation of ``log rho(u)``, relative error ``O(1/u)``."""
    xv = solve_xi(u)
    I_xi = I_integral(xv.xi)
    log_rho = (
        0.5 * math.log(xv.xi_prime / (2.0 * math.pi))
        + EULER_GAMMA
        - xv.u * xv.xi
        + I_xi
    )
    return DickmanContext(xv.u, log_rho, I_xi, "alladi_asymptotic")


def theorem3_estimate(n, r):
    """``log P(l_r(Z) = n) ~ -gamma - log r + log rho(n/r)``.

    Accurate to relative order ``n log(n/r + 1) / r**2`` once
    ``r >= sqrt(n log n)``. For ``n/r`` beyond the tabulated range the
    Alladi form stands in for ``rho``.
    """
    n, r = check_n_r(n, r)
    u = n / r
    log_rho = _TABLE.log_rho(u) if u <= RHO_MAX_U else rho_alladi(u).log_rho
    return -EULER_GAMMA - math.log(r) + log_rho


def corollary1_estimate(n, r):
    """``log P(l_r(Z) = n) ~ -log(2 pi r n)/2 + I(xi) - u xi`` with ``u = n/r``."""
    n, r = check_n_r(n, r)
    if r < 2 or n <= r:
        raise RangeError(f"corollary1_estimate needs r >= 2 and n/r > 1, got n={n}, r={r}")
    u = n / r
    xi = solve_xi(u).xi
    return -0.5 * math.log(2.0 * math.pi * r * n) + I_integral(xi) - u * xi

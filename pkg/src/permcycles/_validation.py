"""Input validation helpers shared by the numerical modules and the estimator."""

import numbers

import numpy as np

from .exceptions import ConfigError, RangeError


def check_int(value, name):
    """Return ``value`` as a Python int, rejecting floats with a fractional part."""
    if isinstance(value, bool):
        raise RangeError(f"{name} must be an integer, got bool")
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real) and float(value).is_integer():
        return int(value)
    raise RangeError(f"{name} must be an integer, got {value!r}")


def check_n_r(n, r, max_n=None):
    """Validate a (size, cycle bound) pair with ``1 <= r <= n``."""
    n = check_int(n, "n")
    r = check_int(r, "r")
    if n < 1:
        raise RangeError(f"n must be >= 1, got {n}")
    if not 1 <= r <= n:
        raise RangeError(f"r must satisfy 1 <= r <= n={n}, got {r}")
    if max_n is not None and n > max_n:
        raise RangeError(f"n={n} exceeds the configured maximum {max_n}")
    return n, r


def check_tol(tol, lo=1e-15, hi=1e-6):
    tol = float(tol)
    if not lo <= tol <= hi:
        raise ConfigError(f"tol must lie in [{lo:g}, {hi:g}], got {tol!r}")
    return tol


def check_pairs(X):
    """Validate an array-like of ``(n, r)`` rows for the estimator API.

    Returns an ``(m, 2)`` int64 array. Every row must satisfy ``1 <= r <= n``.
    """
    from sklearn.utils.validation import check_array

    arr = check_array(X, dtype=np.float64, ensure_2d=True)
    if arr.shape[1] != 2:
        raise ValueError(f"X must have exactly 2 columns (n, r), got {arr.shape[1]}")
    if not np.all(arr == np.round(arr)):
        raise ValueError("X must contain integer (n, r) pairs")
    pairs = arr.astype(np.int64)
    n, r = pairs[:, 0], pairs[:, 1]
    bad = (n < 1) | (r < 1) | (r > n)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"row {i} violates 1 <= r <= n: {tuple(pairs[i])}")
    return pairs

"""scikit-learn style wrapper around the estimates.

Rows of ``X`` are ``(n, r)`` pairs. Nothing is learned: ``fit`` validates the
configuration and builds the shared Dickman table once so later calls (and
threads) only read it.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_pairs, check_tol
from .dickman import prebuild_table
from .exceptions import ConfigError
from .harness import EXACT_MODES, best_estimate, compare_cell
from .saddle import DEFAULT_TOL

__all__ = ["CycleBoundProbability", "TRANSFORM_COLUMNS"]

TRANSFORM_COLUMNS = ("exact_log", "t1_log", "t2_log", "t3_log", "c1_log")
METHODS = ("best",) + tuple(c[:-4] for c in TRANSFORM_COLUMNS)


class CycleBoundProbability(TransformerMixin, RegressorMixin, BaseEstimator):
    """``log P(l_r(Z) = n)`` for rows ``(n, r)``.

    Parameters
    ----------
    method : {"best", "exact", "t1", "t2", "t3", "c1"}
        What :meth:`predict` returns. ``best`` picks the estimate proven for
        the row's regime; the others return one column of :meth:`transform`
        (NaN where that estimate does not apply).
    exact_mode : {"bigint", "float", "off"}
        How the ``exact_log`` column is computed.
    tol : float
        Relative tolerance of the saddle solver.
    """

    def __init__(self, method="best", exact_mode="float", tol=DEFAULT_TOL):
        self.method = method
        self.exact_mode = exact_mode
        self.tol = tol

    def _check_params(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.exact_mode not in EXACT_MODES:
            raise ConfigError(f"exact_mode must be one of {EXACT_MODES}, got {self.exact_mode!r}")
        check_tol(self.tol)

    def fit(self, X, y=None):
        self._check_params()
        pairs = check_pairs(X)
        prebuild_table(float(np.max(pairs[:, 0] / pairs[:, 1])))
        self.n_features_in_ = 2
        self.is_fitted_ = True
        return self

    def transform(self, X):
        """Columns ``exact_log, t1_log, t2_log, t3_log, c1_log``; NaN where absent."""
        check_is_fitted(self, "is_fitted_")
        pairs = check_pairs(X)
        out = np.full((len(pairs), len(TRANSFORM_COLUMNS)), np.nan)
        for i, (n, r) in enumerate(pairs):
            rec = compare_cell(int(n), int(r), self.exact_mode, self.tol)
            for j, name in enumerate(TRANSFORM_COLUMNS):
                val = getattr(rec, name)
                if val is not None:
                    out[i, j] = val
        return out

    def predict(self, X):
        check_is_fitted(self, "is_fitted_")
        pairs = check_pairs(X)
        if self.method == "best":
            return np.array([best_estimate(int(n), int(r), tol=self.tol) for n, r in pairs])
        col = TRANSFORM_COLUMNS.index(self.method + "_log")
        return self.transform(pairs)[:, col]

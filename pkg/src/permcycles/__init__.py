"""Cycle-bounded random permutations: exact values and asymptotic estimates.

``nu(n, r)`` is the probability that a uniform random permutation of ``n``
elements has no cycle longer than ``r``.
"""

from .dickman import (
    EULER_GAMMA,
    I_integral,
    corollary1_estimate,
    rho,
    rho_alladi,
    solve_xi,
    theorem3_estimate,
)
from .estimator import CycleBoundProbability
from .exactcount import (
    CycleBoundCount,
    LogValue,
    brute_force_count,
    coefficient_oracle,
    exact_count,
    harmonic,
    nu_log,
    poisson_local_prob_log,
)
from .exceptions import (
    ConfigError,
    ConvergenceError,
    PermCyclesError,
    RangeError,
    RangeWarning,
    ResourceError,
)
from .harness import (
    ComparisonRecord,
    GridSpec,
    best_estimate,
    emit,
    regime,
    run_grid,
)
from .saddle import (
    SaddleSolution,
    T_function,
    lambda_k,
    log_Q,
    q_decomposition_check,
    solve_saddle,
    theorem2_estimate,
)
from .series import (
    CoeffTable,
    b_coeff,
    build_coeff_table,
    d_coeff,
    d_table_exact,
    g_coeff,
    phi_power_coeff,
    theorem1_estimate,
    x_expansion,
)

__version__ = "0.1.0"

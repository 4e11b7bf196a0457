"""Optimal timely sampling of Ornstein-Uhlenbeck processes over an erasure channel.

A shared sensor samples K independent OU processes through an exp(mu) server
and an erasure channel under a sampling-frequency budget. This package
computes the optimal threshold waiting policy and its minimum long-term
average sum MSE in closed form, and independently validates the sensing loop
with an exact-distribution Monte Carlo simulator.
"""

__version__ = "0.1.0"

from .model import (
    ConfigError,
    OuState,
    SystemConfig,
    mse_instant,
    mse_integral,
    stationary_variance,
    validate,
)
from .special import TruncationPlan, make_truncation_plan, negbin_pmf, reg_incomplete_gamma
from .functionals import (
    AnalyticContext,
    dinkelbach_p,
    f_fn,
    g_fn,
    g_inverse,
    h_fn,
    h_inverse,
    make_context,
    mean_epoch_service,
)
from .solver import (
    OptimalPolicy,
    SolverError,
    SolverSettings,
    constraint_level,
    policy_mse,
    solve,
    waiting,
)
from .simulator import (
    EpochRecord,
    SimulationStats,
    WaitMode,
    estimate_sampling_freq,
    maf_select,
    ou_transition,
    run,
    write_trace,
)

__all__ = [
    "__version__",
    "ConfigError",
    "OuState",
    "SystemConfig",
    "mse_instant",
    "mse_integral",
    "stationary_variance",
    "validate",
    "TruncationPlan",
    "make_truncation_plan",
    "negbin_pmf",
    "reg_incomplete_gamma",
    "AnalyticContext",
    "make_context",
    "g_fn",
    "g_inverse",
    "h_fn",
    "h_inverse",
    "f_fn",
    "mean_epoch_service",
    "dinkelbach_p",
    "OptimalPolicy",
    "SolverError",
    "SolverSettings",
    "constraint_level",
    "solve",
    "policy_mse",
    "waiting",
    "EpochRecord",
    "SimulationStats",
    "WaitMode",
    "estimate_sampling_freq",
    "maf_select",
    "ou_transition",
    "run",
    "write_trace",
]

"""Capacity-threshold analysis for the SIR epidemic model.

Closed forms built on the Lambert W function give the epidemic peak, the
critical reproduction number at which the peak meets a capacity ``M``, and
five measures of how badly ``M`` is exceeded. A fixed-step RK4 integrator
provides the time-domain picture and an independent check.
"""
from ._backend import BACKEND
from .errors import (
    DomainError,
    InvalidArgument,
    InvalidInitialCondition,
    InvalidRange,
    InvalidThreshold,
    RegimeError,
    SirThresholdError,
)
from .lambertw import Branch, LogLinearSolutions, lambert_w, solve_log_linear, solve_xlogx
from .sir import (
    ParametricCurve,
    SirParams,
    SirState,
    Trajectory,
    build_curve,
    derivatives,
    integrate,
    parametric_state,
)
from .sweep import ProfileTable, SweepCell, SweepGrid, r0_profile, sweep
from .threshold import (
    AnalysisReport,
    CrossingPoints,
    QuantifierSet,
    ThresholdProblem,
    analyze,
    critical_r0,
    crossings,
    i_max,
    peak_bound,
    q4_antiderivative,
    q5_time_parametrization,
    quantifiers,
    sufficient_condition,
)

__version__ = "0.1.0"

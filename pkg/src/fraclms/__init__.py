"""Classical and fractional-order LMS adaptive filtering.

Streaming LMS and fractional-LMS update rules, the Riemann-Liouville
calculus they are built on, closed-form fractional critical-point algebra,
and a reproducible Monte Carlo system-identification harness with a CLI.
"""

__version__ = "0.1.0"

from .fracderiv import (  # noqa: F401
    DomainError,
    PowerFunction,
    QuadratureError,
    gamma,
    rl_deriv_numeric,
    rl_deriv_numeric_right,
    rl_deriv_power_left,
    rl_deriv_power_right,
)
from .filters import (  # noqa: F401
    AlgorithmSpec,
    FilterState,
    StepOutcome,
    UpdateRule,
    complex_criterion,
    fractional_correction,
    step,
    step_flms1,
    step_flms1_exact,
    step_flms2,
    step_lms,
)
from .critpoints import (  # noqa: F401
    CriticalPointReport,
    DescentMode,
    DescentResult,
    ScalarQuadratic,
    check_refai_bound,
    example_quadratic_critical_points,
    flms1_critical_points,
    flms1_critical_points_noconst,
    flms2_critical_sequence,
    fractional_descent_scalar,
    rl_deriv_at_true_minimum,
    rl_deriv_quadratic,
)
from .harness import (  # noqa: F401
    ExperimentConfig,
    LearningCurve,
    ProtocolId,
    SystemKind,
    SystemSpec,
    WeightInit,
    make_noise,
    mean_deviation,
    paper_protocol,
    run_experiment,
    run_round,
)

"""Input-queued switch toolkit: max-weight scheduling simulation and the
heavy-traffic analysis that goes with it (projection diagnostics, drift
bounds, queue-length brackets)."""

from . import errors
from .bounds import (
    BoundReport,
    DriftParams,
    bernoulli_bracket,
    bernoulli_scaled_limit,
    bernoulli_ssc_constant,
    bernoulli_universal_lower_bound,
    drift_moment_bound,
    drift_tail_bound,
    heavy_traffic_bracket,
    scaling_regime_bracket,
    ssc_drift_threshold,
    ssc_moment_constant,
    universal_lower_bound,
)
from .geometry import (
    ConeDecomposition,
    additivity_residual,
    cone_membership,
    perp_norms,
    project_batch,
    project_onto_cone,
    project_onto_subspace,
)
from .harness import (
    DiagnosticsConfig,
    SimConfig,
    SimEstimate,
    SweepRow,
    default_warmup,
    drift_zero_check,
    heavy_traffic_sweep,
    run_steady_state,
    save_results_json,
    ssc_moment_check,
    write_sweep_csv,
)
from .matching import (
    MatchingResult,
    argmax_set,
    brute_force_matching,
    check_complementary_slackness,
    max_weight_matching,
)
from .model import (
    LyapunovValues,
    Schedule,
    SlotOutcome,
    TrafficModel,
    ValidationReport,
    arrival_block,
    bernoulli_model,
    bernoulli_uniform,
    from_config,
    lyapunov_values,
    sample_arrivals,
    step,
    validate_traffic,
)
from .single_server import (
    CouplingReport,
    analytic_workload_mean,
    coupled_dominance_run,
    single_server_mean,
    step_single_server,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ConeDecomposition",
    "CouplingReport",
    "DiagnosticsConfig",
    "DriftParams",
    "LyapunovValues",
    "MatchingResult",
    "Schedule",
    "SimConfig",
    "SimEstimate",
    "SlotOutcome",
    "SweepRow",
    "TrafficModel",
    "ValidationReport",
    "additivity_residual",
    "analytic_workload_mean",
    "argmax_set",
    "arrival_block",
    "bernoulli_bracket",
    "bernoulli_model",
    "bernoulli_scaled_limit",
    "bernoulli_ssc_constant",
    "bernoulli_uniform",
    "bernoulli_universal_lower_bound",
    "brute_force_matching",
    "check_complementary_slackness",
    "cone_membership",
    "coupled_dominance_run",
    "default_warmup",
    "drift_moment_bound",
    "drift_tail_bound",
    "drift_zero_check",
    "errors",
    "from_config",
    "heavy_traffic_bracket",
    "heavy_traffic_sweep",
    "lyapunov_values",
    "max_weight_matching",
    "perp_norms",
    "project_batch",
    "project_onto_cone",
    "project_onto_subspace",
    "run_steady_state",
    "sample_arrivals",
    "save_results_json",
    "scaling_regime_bracket",
    "single_server_mean",
    "ssc_drift_threshold",
    "ssc_moment_check",
    "ssc_moment_constant",
    "step",
    "step_single_server",
    "universal_lower_bound",
    "validate_traffic",
    "write_sweep_csv",
]

"""Sequential unsharp-measurement CHSH simulation and certification."""

from .qops import (
    BlochDirection,
    DensityMatrix,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    dir_op,
    expectation,
    hermitian_sqrt,
    kron,
    pauli,
    sharp_projector,
    singlet,
)
from .povm import (
    NullOutcomeError,
    OutcomeDistribution,
    PointerQuality,
    UnsharpMeasurement,
    Wing,
    effect,
    effect_sqrt,
    luders_nonselective,
    luders_selective,
    outcome_probability,
    pointer_model_update,
    quality_of,
)
from .scenario import (
    ChshReport,
    ScenarioConfig,
    TSIRELSON_BOUND,
    averaged_correlation,
    chsh_value,
    closed_form_chsh,
    default_config,
    joint_probability,
    propagated_state,
    violation_window_bob1,
)
from .analysis import (
    Constraint,
    GridRange,
    RegionReport,
    SweepSpec,
    TradeoffPoint,
    bob2_violation_onset,
    double_violation_region,
    max_chsh3_under_double_violation,
    pairwise_regions,
    run_sweep,
    tradeoff_curve,
    verify_region_with_engine,
)
from .mc import EstimateReport, TrajectoryRecord, estimate_chsh, run_trajectory, sample_trajectories

__version__ = "0.1.0"

__all__ = [
    "BlochDirection",
    "ChshReport",
    "Constraint",
    "DensityMatrix",
    "EstimateReport",
    "GridRange",
    "NullOutcomeError",
    "OutcomeDistribution",
    "PointerQuality",
    "RegionReport",
    "ScenarioConfig",
    "SweepSpec",
    "TSIRELSON_BOUND",
    "TradeoffPoint",
    "TrajectoryRecord",
    "UnsharpMeasurement",
    "Wing",
    "X_AXIS",
    "Y_AXIS",
    "Z_AXIS",
    "averaged_correlation",
    "bob2_violation_onset",
    "chsh_value",
    "closed_form_chsh",
    "default_config",
    "dir_op",
    "double_violation_region",
    "effect",
    "effect_sqrt",
    "estimate_chsh",
    "expectation",
    "hermitian_sqrt",
    "joint_probability",
    "kron",
    "luders_nonselective",
    "luders_selective",
    "max_chsh3_under_double_violation",
    "outcome_probability",
    "pairwise_regions",
    "pauli",
    "pointer_model_update",
    "propagated_state",
    "quality_of",
    "run_sweep",
    "run_trajectory",
    "sample_trajectories",
    "sharp_projector",
    "singlet",
    "tradeoff_curve",
    "verify_region_with_engine",
    "violation_window_bob1",
]

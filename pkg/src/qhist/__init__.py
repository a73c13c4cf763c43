"""Entangled multi-time histories: chain operators, weights, consistency,
temporal reductions, pre/post-selected statistics, and two-time Bell
functionals, all on dense small-dimensional matrices."""

from .errors import (
    DegenerateHistoryError,
    GridMismatchError,
    ImpossiblePostselectionError,
    NonFactorizableEvolutionError,
    ShapeError,
)
from .histories import (
    BridgingSet,
    ConsistencyReport,
    ElementaryHistory,
    HistoryState,
    MixedHistory,
    SubsystemReduction,
    TimeGrid,
    best_joint_bell_reduction_overlap,
    chain_operator,
    chain_operator_sum,
    decoherence_functional,
    exhaustive_projector_family,
    history_vector,
    hs_inner,
    hs_norm,
    is_consistent_family,
    mix,
    mixed_history_density,
    mixed_overlap,
    normalize,
    purity,
    subsystem_trace_out,
    temporal_partial_trace,
    weight,
)
from .twostate import (
    MarginalReport,
    MeasurementSetting,
    OutcomeDistribution,
    TwoTimeExperiment,
    abl_probability,
    coherent_bundle_distribution,
    coherent_bundle_probability,
    coherent_bundle_weights,
    history_bundle,
    marginal_independence_check,
    mixed_sequence_distribution,
    sequence_distribution,
)
from .bell import (
    BellReport,
    ChainedResult,
    CorrelatorSpec,
    MonogamyResult,
    OptimizeResult,
    OptimizerConfig,
    chained_bell,
    chained_classical_bound,
    classical_bound_bruteforce,
    lgi_from_distributions,
    monogamy_preset_settings,
    monogamy_sum,
    optimize_settings,
    s_lgi,
    settings_from_angles,
    temporal_correlator,
    tsirelson_settings,
)
from .scenarios import SCENARIOS, ScenarioResult, run_scenario

__version__ = "0.1.0"

__all__ = [
    "BellReport",
    "BridgingSet",
    "ChainedResult",
    "ConsistencyReport",
    "CorrelatorSpec",
    "DegenerateHistoryError",
    "ElementaryHistory",
    "GridMismatchError",
    "HistoryState",
    "ImpossiblePostselectionError",
    "MarginalReport",
    "MeasurementSetting",
    "MixedHistory",
    "MonogamyResult",
    "NonFactorizableEvolutionError",
    "OptimizeResult",
    "OptimizerConfig",
    "OutcomeDistribution",
    "SCENARIOS",
    "ScenarioResult",
    "ShapeError",
    "SubsystemReduction",
    "TimeGrid",
    "TwoTimeExperiment",
    "abl_probability",
    "best_joint_bell_reduction_overlap",
    "chain_operator",
    "chain_operator_sum",
    "chained_bell",
    "chained_classical_bound",
    "classical_bound_bruteforce",
    "coherent_bundle_distribution",
    "coherent_bundle_probability",
    "coherent_bundle_weights",
    "decoherence_functional",
    "exhaustive_projector_family",
    "history_bundle",
    "history_vector",
    "hs_inner",
    "hs_norm",
    "is_consistent_family",
    "lgi_from_distributions",
    "marginal_independence_check",
    "mix",
    "mixed_history_density",
    "mixed_overlap",
    "mixed_sequence_distribution",
    "monogamy_preset_settings",
    "monogamy_sum",
    "normalize",
    "optimize_settings",
    "purity",
    "run_scenario",
    "s_lgi",
    "sequence_distribution",
    "settings_from_angles",
    "subsystem_trace_out",
    "temporal_correlator",
    "temporal_partial_trace",
    "tsirelson_settings",
    "weight",
    "__version__",
]

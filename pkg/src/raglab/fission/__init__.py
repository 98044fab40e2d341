from raglab.fission.analysis import (
    DepthBudget,
    FixedPointReport,
    LayerErasureRequirement,
    RecurrenceParams,
    coupled_grid,
    critical_point,
    depth_budget,
    erase_layer_requirement,
    eval_f,
    eval_g,
    eval_g_prime,
    figure_curves,
    first_zero,
    threshold_h,
)
from raglab.fission.tree import (
    ErasureState,
    FissionRunResult,
    LayerParams,
    RetrievalMark,
    TreeTopology,
    apply_retrieval,
    build_tree,
    effective_depth,
    propagate_fission,
    replicate_appendix_sim,
    run_monte_carlo,
    single_transition_mc,
)

__all__ = [
    "DepthBudget",
    "ErasureState",
    "FissionRunResult",
    "FixedPointReport",
    "LayerErasureRequirement",
    "LayerParams",
    "RecurrenceParams",
    "RetrievalMark",
    "TreeTopology",
    "apply_retrieval",
    "build_tree",
    "coupled_grid",
    "critical_point",
    "depth_budget",
    "effective_depth",
    "erase_layer_requirement",
    "eval_f",
    "eval_g",
    "eval_g_prime",
    "figure_curves",
    "first_zero",
    "threshold_h",
    "propagate_fission",
    "replicate_appendix_sim",
    "run_monte_carlo",
    "single_transition_mc",
]

"""Rank-one lattice quadrature with tensor-grid completion and dimension
iteration for high-dimensional integrals on the unit cube."""

from .exprcore import (
    BudgetExceededError,
    DEFAULT_NODE_BUDGET,
    Expr,
    ParseError,
    UnassignedVariableError,
    bind,
    eval,
    eval_array,
    free_vars,
    node_count,
    parse,
    partial_sum,
    substitute,
    to_text,
)
from .lattice import (
    LatticeRule,
    QualityWarning,
    WeightModel,
    cbc_construct,
    fibonacci_rule,
    korobov_search,
    korobov_vector,
    lattice_points,
    p_alpha,
    shift_avg_wce_sq,
)
from .transform import (
    AxisGridSet,
    NonCartesianStructureError,
    TransformedIntegrand,
    axis_counts,
    build_axis_grids,
    forward_transform,
    grid_completion,
    inverse_substitution,
    make_transformed_integrand,
    midpoint_grids,
)
from .mdi import (
    DIRECT_CAP,
    GridCapError,
    MdiConfig,
    MdiReport,
    direct_tensor_sum,
    mdi_lr,
    mdi_sum,
)
from .quad import (
    QuadratureResult,
    implr_integrate,
    mc_integrate,
    mdilr_integrate,
    reference_value,
    slr_integrate,
)
from .corpus import CorpusEntry, all_ids, corpus_expr, entries, get
from .bench import (
    DegenerateDataError,
    FitResult,
    RunRecord,
    fit_all,
    fit_power_law,
    run_suite,
    suite_specs,
)
from .cli import cli_main

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError", "DEFAULT_NODE_BUDGET", "Expr", "ParseError",
    "UnassignedVariableError", "bind", "eval", "eval_array", "free_vars",
    "node_count", "parse", "partial_sum", "substitute", "to_text",
    "LatticeRule", "QualityWarning", "WeightModel", "cbc_construct",
    "fibonacci_rule", "korobov_search", "korobov_vector", "lattice_points",
    "p_alpha", "shift_avg_wce_sq",
    "AxisGridSet", "NonCartesianStructureError", "TransformedIntegrand",
    "axis_counts", "build_axis_grids", "forward_transform", "grid_completion",
    "inverse_substitution", "make_transformed_integrand", "midpoint_grids",
    "DIRECT_CAP", "GridCapError", "MdiConfig", "MdiReport",
    "direct_tensor_sum", "mdi_lr", "mdi_sum",
    "QuadratureResult", "implr_integrate", "mc_integrate", "mdilr_integrate",
    "reference_value", "slr_integrate",
    "CorpusEntry", "all_ids", "corpus_expr", "entries", "get",
    "DegenerateDataError", "FitResult", "RunRecord", "fit_all",
    "fit_power_law", "run_suite", "suite_specs",
    "cli_main",
    "__version__",
]

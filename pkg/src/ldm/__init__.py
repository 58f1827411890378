"""Margin-distribution machine: training, analytics, and model selection.

Binary classification by optimizing the whole margin distribution: the
objective augments the usual hinge/regularization trade-off with the
first two moments of the margins, maximizing their mean and minimizing
their variance.  Two solvers are provided: box-constrained dual
coordinate descent for kernel models and averaged SGD with a two-sample
unbiased gradient estimator for large-scale linear models.
"""

from .analysis import (
    LooBoundReport,
    MarginStats,
    accuracy,
    compute_margins,
    cumulative_curve_export,
    leave_one_out_error,
    loo_bound,
)
from .data import (
    FoldPlan,
    LabeledDataset,
    NormalizationMap,
    SparseVector,
    apply_normalizer,
    fit_normalizer,
    load_sparse_file,
    make_dataset,
    make_folds,
    parse_sparse_file,
    random_split,
    save_sparse_file,
    serialize_dataset,
)
from .errors import DataError, LdmError, SolverError
from .kernel_ldm import (
    DualState,
    KernelLdmModel,
    KernelLdmParams,
    QOperator,
    assemble_q,
    coordinate_step,
    decision_values,
    dual_objective,
    init_state,
    predict,
    solve,
    solve_gram,
)
from .kernels import KernelSpec, cross_gram, gram_matrix, kernel_eval, rbf_width_base
from .linear_ldm import (
    LinearLdmParams,
    LinearModel,
    decision_values_linear,
    exact_gradient,
    exact_objective,
    predict_linear,
    stochastic_gradient,
    train,
)
from .model_io import load_model, save_model
from .model_selection import Config, SearchGrid, SearchResult, cross_validate
from .reports import SolverReport

__version__ = "0.1.0"

__all__ = [
    "Config",
    "DataError",
    "DualState",
    "FoldPlan",
    "KernelLdmModel",
    "KernelLdmParams",
    "KernelSpec",
    "LabeledDataset",
    "LdmError",
    "LinearLdmParams",
    "LinearModel",
    "LooBoundReport",
    "MarginStats",
    "NormalizationMap",
    "QOperator",
    "SearchGrid",
    "SearchResult",
    "SolverError",
    "SolverReport",
    "SparseVector",
    "accuracy",
    "apply_normalizer",
    "assemble_q",
    "compute_margins",
    "coordinate_step",
    "cross_gram",
    "cross_validate",
    "cumulative_curve_export",
    "decision_values",
    "decision_values_linear",
    "dual_objective",
    "exact_gradient",
    "exact_objective",
    "fit_normalizer",
    "gram_matrix",
    "init_state",
    "kernel_eval",
    "leave_one_out_error",
    "load_model",
    "load_sparse_file",
    "loo_bound",
    "make_dataset",
    "make_folds",
    "parse_sparse_file",
    "predict",
    "predict_linear",
    "random_split",
    "rbf_width_base",
    "save_model",
    "save_sparse_file",
    "serialize_dataset",
    "solve",
    "solve_gram",
    "stochastic_gradient",
    "train",
]

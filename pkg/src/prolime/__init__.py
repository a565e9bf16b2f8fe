"""Local surrogate explanations with swappable neighborhood sampling.

The pipeline samples a neighborhood around the explained point, labels it
with the black-box model, weights it by an exponential proximity kernel, and
fits a weighted ridge surrogate whose coefficients form the explanation.
Neighborhoods come either from independent per-feature perturbation or from
the declared feature distribution itself; everything downstream of the
sampler is shared. A synthetic loan-approval benchmark with a known local
ground truth makes the two strategies comparable.
"""

from .core import (
    BlackBoxModel,
    CenterMode,
    ClassProbabilities,
    ConstantModel,
    Distance,
    Explanation,
    FeatureVector,
    LabeledSample,
    LimeHyperparameters,
    LocalSurrogate,
    ModelEvaluationError,
    NoiseMode,
    default_kernel_width,
    rank_features,
)
from .evaluation import (
    CellFailure,
    CellStats,
    ExperimentConfig,
    ExperimentReport,
    MismatchResult,
    coefficient_mismatch,
    draw_test_point,
    report_to_csv,
    report_to_json,
    run_experiment,
    summary_table,
)
from .explainer import (
    BatchConfig,
    BatchExplainError,
    ExplainRequest,
    ExplainStageError,
    draw_neighborhood,
    explain,
    explain_batch,
    sampler_scales,
)
from .samplers import (
    Neighborhood,
    NotPositiveDefiniteError,
    ProcessAwareSpec,
    RngStream,
    SamplerSpec,
    StandardSpec,
    cholesky,
    inverse_normal_cdf,
    latin_hypercube_uniforms,
    sample_process_aware,
    sample_standard,
)
from .simulation import (
    FEATURE_NAMES,
    BenchmarkDistribution,
    DatasetFormatError,
    GroundTruthBoundary,
    OracleModel,
    QUADRANT_BOUNDARIES,
    Quadrant,
    approval_label,
    gaussian_pdf,
    generate_dataset,
    ground_truth_for,
    oracle_model,
    read_dataset_csv,
    write_dataset_csv,
)
from .surrogate import (
    KernelSpec,
    SingularFitError,
    WeightedDesign,
    fit_weighted_ridge,
    kernel_weight,
    label_neighborhood,
    neighborhood_weights,
)
from .plots import plot_dataset, plot_model_grid, plot_neighborhood, svg_scatter

__version__ = "0.1.0"

__all__ = [
    "BatchConfig",
    "BatchExplainError",
    "BenchmarkDistribution",
    "BlackBoxModel",
    "CellFailure",
    "CellStats",
    "CenterMode",
    "ClassProbabilities",
    "ConstantModel",
    "DatasetFormatError",
    "Distance",
    "ExperimentConfig",
    "ExperimentReport",
    "ExplainRequest",
    "ExplainStageError",
    "Explanation",
    "FEATURE_NAMES",
    "FeatureVector",
    "GroundTruthBoundary",
    "KernelSpec",
    "LabeledSample",
    "LimeHyperparameters",
    "LocalSurrogate",
    "MismatchResult",
    "ModelEvaluationError",
    "Neighborhood",
    "NoiseMode",
    "NotPositiveDefiniteError",
    "OracleModel",
    "ProcessAwareSpec",
    "QUADRANT_BOUNDARIES",
    "Quadrant",
    "RngStream",
    "SamplerSpec",
    "SingularFitError",
    "StandardSpec",
    "WeightedDesign",
    "approval_label",
    "cholesky",
    "coefficient_mismatch",
    "default_kernel_width",
    "draw_neighborhood",
    "draw_test_point",
    "explain",
    "explain_batch",
    "fit_weighted_ridge",
    "gaussian_pdf",
    "generate_dataset",
    "ground_truth_for",
    "inverse_normal_cdf",
    "kernel_weight",
    "label_neighborhood",
    "latin_hypercube_uniforms",
    "neighborhood_weights",
    "oracle_model",
    "plot_dataset",
    "plot_model_grid",
    "plot_neighborhood",
    "rank_features",
    "read_dataset_csv",
    "report_to_csv",
    "report_to_json",
    "run_experiment",
    "sample_process_aware",
    "sample_standard",
    "sampler_scales",
    "summary_table",
    "svg_scatter",
    "write_dataset_csv",
]

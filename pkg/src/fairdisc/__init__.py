"""Fairness-discrepancy metrics for generative models.

Scores measure how far a generated-data attribute distribution sits from
the uniform (fair) reference, normalized so 0 = fair and 1 = absolutely
biased, and a benchmark harness quantifies how classifier noise distorts
those scores.
"""

from .attrspace import (
    AttributeSpace,
    CategoricalDistribution,
    ab_extreme_points,
    from_counts,
    load_distribution,
    load_space,
    sweep,
    uniform,
)
from .bench import (
    BenchConfig,
    BenchmarkReport,
    ScoreEntry,
    ScoreKind,
    ScoreSet,
    ep_var,
    mem,
    mepe_ab,
    mepe_fair,
    report_to_csv,
    report_to_markdown,
    run_benchmark,
    run_ep_analysis,
    run_sweep,
)
from .classifier import (
    EXPECTATION,
    ConfusionModel,
    EstimationMode,
    Expectation,
    PredictionRecord,
    Sampled,
    derive_seed,
    estimate,
    from_accuracies,
    ingest_predictions,
    load_confusion,
    load_predictions,
    per_class_accuracy,
    perfect,
    preset,
    uniform_noise,
)
from .errors import ValidationError
from .metrics import (
    DEFAULT_ALPHA,
    FairnessScore,
    Metric,
    delta_specificity,
    fd_score,
    info_specificity,
    l1,
    l2,
    metric_value,
    n_factor,
    parse_metrics,
    specificity,
    wd,
)
from .transport import CostMatrix, TransportPlan, default_cost, load_cost_matrix, solve

__version__ = "0.1.0"

__all__ = [
    "AttributeSpace",
    "BenchConfig",
    "BenchmarkReport",
    "CategoricalDistribution",
    "ConfusionModel",
    "CostMatrix",
    "DEFAULT_ALPHA",
    "EXPECTATION",
    "EstimationMode",
    "Expectation",
    "FairnessScore",
    "Metric",
    "PredictionRecord",
    "Sampled",
    "ScoreEntry",
    "ScoreKind",
    "ScoreSet",
    "TransportPlan",
    "ValidationError",
    "ab_extreme_points",
    "default_cost",
    "delta_specificity",
    "derive_seed",
    "ep_var",
    "estimate",
    "fd_score",
    "from_accuracies",
    "from_counts",
    "info_specificity",
    "ingest_predictions",
    "l1",
    "l2",
    "load_confusion",
    "load_cost_matrix",
    "load_distribution",
    "load_predictions",
    "load_space",
    "mem",
    "mepe_ab",
    "mepe_fair",
    "metric_value",
    "n_factor",
    "parse_metrics",
    "per_class_accuracy",
    "perfect",
    "preset",
    "report_to_csv",
    "report_to_markdown",
    "run_benchmark",
    "run_ep_analysis",
    "run_sweep",
    "solve",
    "specificity",
    "sweep",
    "uniform",
    "uniform_noise",
    "wd",
]

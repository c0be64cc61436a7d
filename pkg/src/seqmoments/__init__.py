"""Moment-based evaluation of probabilistic binary sequence classifiers.

Compares the subsequence-occurrence moments a classifier induces over an
unlabeled domain corpus against the target class's gold moments, separating
compression (training-seen subsequences) from generalization (unseen ones).
"""

from .corpus import (
    Alphabet,
    LabeledSet,
    Sequence,
    SequenceCorpus,
    TaskBundle,
    build_task,
    infer_alphabet,
    iter_windows,
    load_alphabet,
    load_corpus,
    load_family_file,
    load_labeled_set,
    load_task,
    sample_training_set,
    save_corpus,
    save_labeled_set,
    save_task,
    tokenize,
)
from .errors import ConsistencyError, CoverageError, InputError, SeqMomentsError
from .metrics import (
    BASELINE_NAME,
    METRICS,
    MetricReport,
    average_ranks,
    evaluate,
    micro,
    model_pairwise,
    mr,
    mspc,
    mspcp,
    spearman,
)
from .moments import (
    MomentTable,
    SeenPartition,
    SupportSet,
    baseline_moments,
    count_occurrences,
    enumerate_support,
    gold_moments,
    load_moment_table,
    load_support,
    model_moments,
    save_moment_table,
    save_support,
    seen_partition,
)
from .predictions import (
    PredictionSet,
    load_predictions,
    noisy_oracle_predictor,
    oracle_predictor,
    save_predictions,
    validate_coverage,
)
from .report import write_plot_series, write_reports

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "BASELINE_NAME",
    "ConsistencyError",
    "CoverageError",
    "InputError",
    "LabeledSet",
    "METRICS",
    "MetricReport",
    "MomentTable",
    "PredictionSet",
    "SeenPartition",
    "Sequence",
    "SequenceCorpus",
    "SeqMomentsError",
    "SupportSet",
    "TaskBundle",
    "average_ranks",
    "baseline_moments",
    "build_task",
    "count_occurrences",
    "enumerate_support",
    "evaluate",
    "gold_moments",
    "infer_alphabet",
    "iter_windows",
    "load_alphabet",
    "load_corpus",
    "load_family_file",
    "load_labeled_set",
    "load_moment_table",
    "load_predictions",
    "load_support",
    "load_task",
    "micro",
    "model_moments",
    "model_pairwise",
    "mr",
    "mspc",
    "mspcp",
    "noisy_oracle_predictor",
    "oracle_predictor",
    "sample_training_set",
    "save_corpus",
    "save_labeled_set",
    "save_moment_table",
    "save_predictions",
    "save_support",
    "save_task",
    "seen_partition",
    "spearman",
    "tokenize",
    "validate_coverage",
    "write_plot_series",
    "write_reports",
]

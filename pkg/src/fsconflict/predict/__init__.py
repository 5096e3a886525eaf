from .baselines import (
    BASELINES,
    NotPredictable,
    baseline_max2pp,
    baseline_pps,
    baseline_sply,
    count_transitions,
)
from .features import (
    CONFLICT_FEATURES,
    Dataset,
    FeatureConfig,
    LabeledExample,
    SplitError,
    build_dataset,
    class_weights,
    default_cutoff,
    sample_weights,
    temporal_split,
)
from .forest import ForestConfig, ForestModel, train_forest
from .harness import RunResult, manifest, run_models, write_importance, write_manifest, write_table
from .logistic import DegenerateTraining, LogisticConfig, LogisticModel, loss_and_grad, train_logistic
from .metrics import EvalError, MetricsReport, evaluate, feature_importance

"""Robust PU learning: hardness-scheduled sample weighting around PU risk baselines."""

from .data import (
    DatasetSchema,
    PUSplit,
    RawDataset,
    SplitSpec,
    TrainView,
    binarize,
    load_dataset,
    load_split,
    make_pu_split,
    save_split,
)
from .errors import (
    ConfigurationError,
    IngestionError,
    IntegrityError,
    RobustPUError,
    ScheduleTooStrict,
    SizingError,
    TrainingDiverged,
    UsageError,
)
from .hardness import HardnessVector, measure_hardness
from .harness import (
    ExperimentSpec,
    ResultRow,
    error_rate,
    run_experiment,
    run_single,
    run_sweep,
)
from .numcore import ModelState, init_model, mlp_forward, predict_prob
from .pacing import ScheduleConfig, threshold
from .risk import RiskConfig, nnpu_risk, pn_risk, pretrain, upu_risk
from .trainer import (
    IterationRecord,
    TrainConfig,
    TrainResult,
    accuracy,
    load_checkpoint,
    robust_pu_train,
    save_checkpoint,
)
from .weighting import WeightVector, map_weights

__version__ = "0.1.0"

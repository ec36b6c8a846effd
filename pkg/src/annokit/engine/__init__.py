"""Multi-task active learning engine: model, pool, kernels, snapshots."""

from .errors import (
    EmptyPool,
    EngineError,
    MissingAlpha,
    NoLabeledData,
    NonFiniteInput,
    UnknownLabel,
    UnknownTask,
    UntrainedModel,
)
from .features import ExternalEncoderExtractor, HashedFeatureExtractor
from .model import (
    CLASSIFICATION,
    SEQUENCE,
    ALConfig,
    Instance,
    MultiTaskModel,
    TaskHead,
    TrainingStats,
    instance_confidence,
    joint_loss,
    softmax,
    suggest,
    train,
)
from .pool import PoolState, select_queries, select_random
from .snapshot import load_snapshot, save_snapshot

__all__ = [
    "ALConfig",
    "CLASSIFICATION",
    "SEQUENCE",
    "Instance",
    "MultiTaskModel",
    "TaskHead",
    "TrainingStats",
    "softmax",
    "joint_loss",
    "instance_confidence",
    "suggest",
    "train",
    "PoolState",
    "select_queries",
    "select_random",
    "save_snapshot",
    "load_snapshot",
    "HashedFeatureExtractor",
    "ExternalEncoderExtractor",
    "EngineError",
    "NonFiniteInput",
    "UnknownTask",
    "UnknownLabel",
    "MissingAlpha",
    "EmptyPool",
    "NoLabeledData",
    "UntrainedModel",
]

"""Simulation harness: metrics, synthetic corpora, simulated annotators, scenarios."""

from .annotator import MissingGold, SimulatedAnnotator
from .corpus import (
    CHUNK_TASK,
    ENTITY_TASK,
    SENTIMENT_LABELS,
    InvalidParams,
    SentimentCorpusParams,
    SeqCorpus,
    SeqCorpusParams,
    generate_sentiment_corpus,
    generate_sequence_corpus,
    read_conll,
)
from .metrics import (
    LengthMismatch,
    SequenceScores,
    bio_spans,
    classification_accuracy,
    evaluate_sequence_labeling,
)
from .scenarios import SimConfig, area_under_curve, run_scenario

__all__ = [
    "SimulatedAnnotator",
    "MissingGold",
    "SeqCorpusParams",
    "SeqCorpus",
    "SentimentCorpusParams",
    "generate_sequence_corpus",
    "generate_sentiment_corpus",
    "read_conll",
    "CHUNK_TASK",
    "ENTITY_TASK",
    "SENTIMENT_LABELS",
    "InvalidParams",
    "bio_spans",
    "evaluate_sequence_labeling",
    "classification_accuracy",
    "SequenceScores",
    "LengthMismatch",
    "SimConfig",
    "run_scenario",
    "area_under_curve",
]

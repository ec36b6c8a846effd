"""Synthetic corpora and CoNLL-format reading for the experiment harness.

The sequence generator builds sentences segment by segment from a transition
table over (chunk-type, entity-kind) states, so both tag layers are aligned
and BIO-valid by construction. A configurable share of sentences comes from
a small bank of duplicated easy templates; the rest contain ambiguous tokens
whose entity reading depends on a one-token context cue, which is what makes
uncertainty-driven querying pay off.

The sentiment generator produces a disagreement corpus: each statement class
has either a fixed label or a label that flips with the annotator's age
bucket, so a statement-only predictor is capped at the majority-within-class
rate while an age-aware one is not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..engine.model import Instance


class InvalidParams(ValueError):
    pass


CHUNK_TASK = "chunk"
ENTITY_TASK = "entity"

CHUNK_LABELS = ("B-NP", "I-NP", "B-VP", "I-VP", "B-PP", "I-PP", "O")
ENTITY_LABELS = ("B-PER", "I-PER", "B-ORG", "I-ORG", "B-LOC", "I-LOC", "O")

# segment states: (chunk type, entity kind or None)
_STATES = (
    ("NP", None),
    ("NP", "PER"),
    ("NP", "ORG"),
    ("NP", "LOC"),
    ("VP", None),
    ("PP", None),
)

# row-stochastic transitions between segment states (columns follow _STATES);
# sentences are NP-like VP (NP|PP)... and stop via the stop_prob below
_DEFAULT_TRANSITIONS = {
    None: (0.4, 0.25, 0.2, 0.15, 0.0, 0.0),  # sentence start
    ("NP", None): (0.0, 0.0, 0.0, 0.0, 0.85, 0.15),
    ("NP", "PER"): (0.0, 0.0, 0.0, 0.0, 0.85, 0.15),
    ("NP", "ORG"): (0.0, 0.0, 0.0, 0.0, 0.85, 0.15),
    ("NP", "LOC"): (0.0, 0.0, 0.0, 0.0, 0.85, 0.15),
    ("VP", None): (0.45, 0.2, 0.15, 0.1, 0.0, 0.1),
    ("PP", None): (0.4, 0.25, 0.2, 0.15, 0.0, 0.0),
}


@dataclass(frozen=True)
class SeqCorpusParams:
    n_sentences: int = 2000
    n_heldout: int = 600
    entity_rate: float = 0.25  # fraction of sentences carrying any entity
    easy_rate: float = 0.55  # fraction of plain sentences drawn from templates
    n_easy_templates: int = 30
    vocab_nouns: int = 16
    vocab_verbs: int = 10
    vocab_names: int = 24
    n_ambiguous: int = 16
    ambiguous_rate: float = 0.3
    max_segments: int = 5
    stop_prob: float = 0.35
    transitions: dict = field(default_factory=lambda: dict(_DEFAULT_TRANSITIONS))

    def validate(self) -> None:
        if self.n_sentences <= 0 or self.n_heldout <= 0:
            raise InvalidParams("corpus sizes must be positive")
        if not 0 <= self.easy_rate <= 1:
            raise InvalidParams("easy_rate must be in [0, 1]")
        for state, row in self.transitions.items():
            if len(row) != len(_STATES):
                raise InvalidParams(f"transition row {state} has wrong arity")
            if abs(sum(row) - 1.0) > 1e-9:
                raise InvalidParams(f"transition row {state} must sum to 1")


@dataclass
class SeqCorpus:
    train: list[Instance]
    heldout: list[Instance]
    label_sets: dict[str, tuple[str, ...]]
    params: SeqCorpusParams


class _SeqVocab:
    def __init__(self, params: SeqCorpusParams):
        self.dets = ("the", "a")
        self.preps = ("in", "on", "near")
        self.titles = ("mr", "dr")
        self.nouns = tuple(f"noun{i}" for i in range(params.vocab_nouns))
        self.verbs = tuple(f"verb{i}" for i in range(params.vocab_verbs))
        self.first = tuple(f"pfn{i}" for i in range(params.vocab_names))
        self.last = tuple(f"pln{i}" for i in range(params.vocab_names))
        self.orga = tuple(f"orga{i}" for i in range(params.vocab_names))
        self.orgb = tuple(f"orgb{i}" for i in range(params.vocab_names))
        self.locs = tuple(f"loc{i}" for i in range(params.vocab_names))
        # ambiguous tokens: plain noun after a determiner, person name after a title
        self.ambiguous = tuple(f"amb{i}" for i in range(params.n_ambiguous))


def _emit_ambiguous_np(vocab: _SeqVocab, rng):
    """NP whose head is an ambiguous token with a per-token context rule.

    Even-indexed ambiguous tokens read as a person after a determiner, odd
    ones after a title; the other cue makes them a plain noun. Both cues sit
    inside the extractor's context window, so each (token, cue) pattern is
    learnable once observed.
    """
    i = int(rng.integers(len(vocab.ambiguous)))
    cue_is_det = bool(rng.integers(2))
    cue = rng.choice(vocab.dets) if cue_is_det else rng.choice(vocab.titles)
    person = cue_is_det == (i % 2 == 0)
    tokens = [cue, vocab.ambiguous[i]]
    chunks = ["B-NP", "I-NP"]
    ents = ["O", "B-PER" if person else "O"]
    return tokens, chunks, ents


def _emit_segment(state, vocab: _SeqVocab, rng, amb_rate: float):
    """Tokens plus aligned (chunk, entity) tags for one segment."""
    chunk, entity = state
    use_amb = rng.random() < amb_rate
    if chunk == "NP" and entity is None:
        if use_amb:
            return _emit_ambiguous_np(vocab, rng)
        tokens = [rng.choice(vocab.dets), rng.choice(vocab.nouns)]
        chunks = ["B-NP", "I-NP"]
        ents = ["O", "O"]
    elif entity == "PER":
        tokens = [rng.choice(vocab.first), rng.choice(vocab.last)]
        chunks = ["B-NP", "I-NP"]
        ents = ["B-PER", "I-PER"]
    elif entity == "ORG":
        tokens = [rng.choice(vocab.orga), rng.choice(vocab.orgb)]
        chunks = ["B-NP", "I-NP"]
        ents = ["B-ORG", "I-ORG"]
    elif entity == "LOC":
        tokens = [rng.choice(vocab.locs)]
        chunks = ["B-NP"]
        ents = ["B-LOC"]
    elif chunk == "VP":
        tokens = [rng.choice(vocab.verbs)]
        chunks = ["B-VP"]
        ents = ["O"]
    else:  # PP
        tokens = [rng.choice(vocab.preps), rng.choice(vocab.dets), rng.choice(vocab.nouns)]
        chunks = ["B-PP", "I-PP", "I-PP"]
        ents = ["O", "O", "O"]
    return tokens, chunks, ents


_PLAIN_STATES = (0, 4, 5)  # NP-None, VP, PP rows of _STATES
_ENTITY_STATES = (1, 2, 3)  # PER, ORG, LOC rows


def _renormalized(row, allowed):
    masked = [row[i] if i in allowed else 0.0 for i in range(len(row))]
    total = sum(masked)
    if total == 0:
        masked = [1.0 if i in allowed else 0.0 for i in range(len(row))]
        total = sum(masked)
    return [v / total for v in masked]


def _sample_sentence(params: SeqCorpusParams, vocab: _SeqVocab, rng, kind: str):
    """One sentence; kind "plain" has no entities, "entity" has at least one."""
    tokens: list[str] = []
    chunks: list[str] = []
    ents: list[str] = []
    state = None
    forced_entity = kind == "entity"
    for seg in range(params.max_segments):
        row = params.transitions[state]
        if kind == "plain":
            row = _renormalized(row, set(_PLAIN_STATES))
        elif forced_entity and row[1] + row[2] + row[3] > 0:
            row = _renormalized(row, set(_ENTITY_STATES))
            forced_entity = False
        idx = int(rng.choice(len(_STATES), p=row))
        state = _STATES[idx]
        amb_rate = params.ambiguous_rate if kind == "entity" else 0.0
        t, c, e = _emit_segment(state, vocab, rng, amb_rate)
        tokens += t
        chunks += c
        ents += e
        if seg >= 1 and not forced_entity and rng.random() < params.stop_prob:
            break
    tokens.append(".")
    chunks.append("O")
    ents.append("O")
    return tokens, chunks, ents


def generate_sequence_corpus(params: SeqCorpusParams, seed: int) -> SeqCorpus:
    """Deterministic two-layer tagging corpus; train pool plus held-out split."""
    params.validate()
    rng = np.random.default_rng(seed)
    vocab = _SeqVocab(params)
    templates = [
        _sample_sentence(params, vocab, rng, kind="plain")
        for _ in range(params.n_easy_templates)
    ]

    def build(count, offset):
        out = []
        for i in range(count):
            if rng.random() < params.entity_rate:
                tokens, chunks, ents = _sample_sentence(params, vocab, rng, kind="entity")
            elif rng.random() < params.easy_rate:
                tokens, chunks, ents = templates[int(rng.integers(len(templates)))]
            else:
                tokens, chunks, ents = _sample_sentence(params, vocab, rng, kind="plain")
            out.append(
                Instance(
                    offset + i,
                    tuple(tokens),
                    {CHUNK_TASK: tuple(chunks), ENTITY_TASK: tuple(ents)},
                )
            )
        return out

    train = build(params.n_sentences, 0)
    heldout = build(params.n_heldout, params.n_sentences)
    return SeqCorpus(
        train=train,
        heldout=heldout,
        label_sets={CHUNK_TASK: CHUNK_LABELS, ENTITY_TASK: ENTITY_LABELS},
        params=params,
    )


# ---------------------------------------------------------------- sentiment

SENTIMENT_LABELS = ("neg", "weak_neg", "neutral", "weak_pos", "pos")
YOUNG_OLD_THRESHOLD = 45


@dataclass(frozen=True)
class SentimentCorpusParams:
    n_statement_classes: int = 20
    age_dependent_rate: float = 0.4
    n_train: int = 1200
    n_heldout: int = 800

    def validate(self) -> None:
        if self.n_statement_classes < 2:
            raise InvalidParams("need at least 2 statement classes")
        if not 0 <= self.age_dependent_rate <= 1:
            raise InvalidParams("age_dependent_rate must be in [0, 1]")


@dataclass(frozen=True)
class AnnotationEvent:
    """One (statement, annotator, gold label) draw from the population."""

    event_id: int
    statement_class: int
    tokens: tuple[str, ...]
    age: int
    label: str


@dataclass
class SentimentCorpus:
    train: list[AnnotationEvent]
    heldout: list[AnnotationEvent]
    labels_by_bucket: dict[int, tuple[str, str]]  # class -> (young label, old label)
    params: SentimentCorpusParams

    def statement_tokens(self, cls: int) -> tuple[str, ...]:
        return (f"stmt{cls}", f"about{cls}", f"topic{cls}")

    def label_of(self, cls: int, age: int) -> str:
        young, old = self.labels_by_bucket[cls]
        return young if age < YOUNG_OLD_THRESHOLD else old

    def dependent_classes(self) -> list[int]:
        return [c for c, (y, o) in self.labels_by_bucket.items() if y != o]

    def bayes_statement_only_accuracy(self) -> float:
        """Best achievable accuracy for a text-only predictor (analytic).

        Age buckets are balanced by construction, so an age-dependent class
        contributes 1/2 and a fixed class contributes 1, uniformly weighted.
        """
        n = self.params.n_statement_classes
        n_dep = len(self.dependent_classes())
        return ((n - n_dep) + 0.5 * n_dep) / n

    def designed_disagreement_rate(self) -> float:
        """Probability two opposite-bucket annotators disagree on a random class."""
        return len(self.dependent_classes()) / self.params.n_statement_classes


def generate_sentiment_corpus(params: SentimentCorpusParams, seed: int) -> SentimentCorpus:
    """Deterministic disagreement corpus with an age-conditioned label function."""
    params.validate()
    rng = np.random.default_rng(seed)
    n = params.n_statement_classes
    n_dep = int(round(params.age_dependent_rate * n))
    dep_classes = set(rng.choice(n, size=n_dep, replace=False).tolist())
    labels_by_bucket = {}
    for c in range(n):
        young = SENTIMENT_LABELS[int(rng.integers(len(SENTIMENT_LABELS)))]
        if c in dep_classes:
            others = [l for l in SENTIMENT_LABELS if l != young]
            old = others[int(rng.integers(len(others)))]
        else:
            old = young
        labels_by_bucket[c] = (young, old)

    corpus = SentimentCorpus([], [], labels_by_bucket, params)

    def draw(count, offset):
        events = []
        for i in range(count):
            cls = int(rng.integers(n))
            if rng.random() < 0.5:
                age = int(rng.integers(20, 40))
            else:
                age = int(rng.integers(50, 70))
            events.append(
                AnnotationEvent(
                    event_id=offset + i,
                    statement_class=cls,
                    tokens=corpus.statement_tokens(cls),
                    age=age,
                    label=corpus.label_of(cls, age),
                )
            )
        return events

    corpus.train = draw(params.n_train, 0)
    corpus.heldout = draw(params.n_heldout, params.n_train)
    return corpus


# -------------------------------------------------------------------- conll

def read_conll(
    path: str | Path, columns: dict[str, int] | None = None
) -> tuple[list[Instance], dict[str, tuple[str, ...]]]:
    """Whitespace-separated columns, blank-line sentence separation.

    `columns` maps task name to a column index for its tag layer; default is
    chunk/entity from the last two columns.
    """
    columns = columns or {CHUNK_TASK: -2, ENTITY_TASK: -1}
    instances: list[Instance] = []
    label_sets: dict[str, set] = {t: set() for t in columns}
    tokens: list[str] = []
    tags: dict[str, list[str]] = {t: [] for t in columns}

    def flush():
        nonlocal tokens, tags
        if tokens:
            instances.append(
                Instance(
                    len(instances),
                    tuple(tokens),
                    {t: tuple(ts) for t, ts in tags.items()},
                )
            )
        tokens = []
        tags = {t: [] for t in columns}

    with open(path, encoding="utf-8") as f:
        for line in f:
            cols = line.split()
            if not cols:
                flush()
                continue
            tokens.append(cols[0])
            for task, idx in columns.items():
                tag = cols[idx]
                tags[task].append(tag)
                label_sets[task].add(tag)
    flush()
    return instances, {t: tuple(sorted(s)) for t, s in label_sets.items()}

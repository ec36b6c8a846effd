"""Few-shot prompt construction and exemplar selection."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np


class PromptError(Exception):
    pass


class EmptyExamples(PromptError):
    pass


class PoolTooSmall(PromptError):
    pass


class EmbedderUnavailable(PromptError):
    pass


class ZeroVector(PromptError):
    pass


class DimMismatch(PromptError):
    pass


@dataclass(frozen=True)
class FewShotExample:
    """One exemplar: sentence plus its space-joined answer tags."""

    sentence: str
    answer: str
    task_name: str = ""


def build_prompt(examples: list[FewShotExample], target_sentence: str, task_name: str) -> str:
    """Render the few-shot prompt.

    Each exemplar becomes
    ``Given the sentence `` S '' the TASK are `` A ''`` ; clauses are joined
    by two newlines and the target clause stops after "are" with no answer.
    """
    if not examples:
        raise EmptyExamples("at least one exemplar is required")
    clauses = [
        f"Given the sentence `` {ex.sentence} '' the {task_name} are `` {ex.answer} ''"
        for ex in examples
    ]
    clauses.append(f"Given the sentence `` {target_sentence} '' the {task_name} are")
    return "\n\n".join(clauses)


def target_sentence_of(prompt: str) -> str:
    """Inverse of the target clause: the sentence the prompt asks about."""
    tail = prompt.rsplit("Given the sentence `` ", 1)[1]
    return tail.rsplit(" '' the ", 1)[0]


def _apply_token_cap(train: list[FewShotExample], cap: int | None) -> list[tuple[int, FewShotExample]]:
    pairs = list(enumerate(train))
    if cap is None:
        return pairs
    return [(i, ex) for i, ex in pairs if len(ex.sentence.split()) <= cap]


def select_random(
    train: list[FewShotExample],
    n: int,
    seed: int,
    max_sentence_tokens: int | None = None,
) -> list[FewShotExample]:
    """n distinct exemplars, uniform without replacement, in draw order."""
    eligible = [ex for _, ex in _apply_token_cap(train, max_sentence_tokens)]
    if n > len(eligible):
        raise PoolTooSmall(f"need {n} exemplars, pool has {len(eligible)}")
    return random.Random(seed).sample(eligible, n)


def cosine(u, v) -> float:
    """u.v / (|u||v|)."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimMismatch(f"dims differ: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ZeroVector("cosine undefined for a zero vector")
    # clamp: rounding may land one ulp outside [-1, 1]
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def select_similar(
    train: list[FewShotExample],
    target_sentence: str,
    n: int,
    embedder,
    max_sentence_tokens: int | None = None,
) -> list[FewShotExample]:
    """The n exemplars most cosine-similar to the target, descending.

    Ties break toward the lower training index.
    """
    if embedder is None:
        raise EmbedderUnavailable("no embedder configured")
    eligible = _apply_token_cap(train, max_sentence_tokens)
    if n > len(eligible):
        raise PoolTooSmall(f"need {n} exemplars, pool has {len(eligible)}")
    target_vec = embedder.embed(target_sentence)
    scored = []
    for i, ex in eligible:
        try:
            score = cosine(embedder.embed(ex.sentence), target_vec)
        except ZeroVector:
            score = float("-inf")
        scored.append((-score, i, ex))
    scored.sort(key=lambda item: (item[0], item[1]))
    return [ex for _, _, ex in scored[:n]]

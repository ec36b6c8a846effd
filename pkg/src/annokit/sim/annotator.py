"""Simulated annotators: answer served instances with (optionally noised) gold."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np


class MissingGold(KeyError):
    pass


@dataclass
class SimulatedAnnotator:
    """Gold-backed annotator; flips each label to a random wrong one at rate eps."""

    gold: Mapping[Any, dict]  # instance_id -> {task: labels}
    label_sets: Mapping[str, tuple]
    noise_rate: float = 0.0
    seed: int = 0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self._rng = np.random.default_rng(self.seed)

    def _flip(self, label: str, label_set: tuple) -> str:
        others = [l for l in label_set if l != label]
        if not others:
            return label
        return others[int(self._rng.integers(len(others)))]

    def labels_for(self, instance_id, task: str):
        by_task = self.gold.get(instance_id)
        if by_task is None or task not in by_task:
            raise MissingGold(f"no gold for instance {instance_id!r} task {task!r}")
        gold = by_task[task]
        if self.noise_rate == 0.0:
            return gold
        label_set = tuple(self.label_sets[task])
        if isinstance(gold, (list, tuple)):
            return tuple(
                self._flip(l, label_set) if self._rng.random() < self.noise_rate else l
                for l in gold
            )
        if self._rng.random() < self.noise_rate:
            return self._flip(gold, label_set)
        return gold

"""Pool bookkeeping and least-confidence query selection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import EmptyPool
from .model import ALConfig, Instance, MultiTaskModel


@dataclass
class PoolState:
    labeled: set = field(default_factory=set)
    unlabeled: set = field(default_factory=set)
    queried: list = field(default_factory=list)

    def mark_labeled(self, instance_id: Any) -> None:
        self.unlabeled.discard(instance_id)
        self.labeled.add(instance_id)

    @property
    def pending(self) -> list:
        return [i for i in self.queried if i not in self.labeled]


def select_queries(
    model: MultiTaskModel,
    pool: PoolState,
    cfg: ALConfig,
    instances: Mapping[Any, Instance],
) -> list:
    """The k least-confident unlabeled instances, ties broken by ascending id.

    Multi-task confidence is the mean of per-task confidences. Selected ids
    move from the unlabeled set onto the queried list.
    """
    if not pool.unlabeled:
        raise EmptyPool("no unlabeled instances to query")
    scored = []
    for iid in sorted(pool.unlabeled):
        confs = model.confidences(instances[iid], cfg.confidence_agg)
        scored.append((sum(confs.values()) / len(confs), iid))
    scored.sort(key=lambda pair: (pair[0], pair[1]))
    chosen = [iid for _, iid in scored[: min(cfg.query_batch_k, len(scored))]]
    for iid in chosen:
        pool.unlabeled.discard(iid)
        pool.queried.append(iid)
    return chosen


def select_random(pool: PoolState, k: int, rng) -> list:
    """Random baseline with the same pool bookkeeping as select_queries."""
    if not pool.unlabeled:
        raise EmptyPool("no unlabeled instances to query")
    ordered = sorted(pool.unlabeled)
    k = min(k, len(ordered))
    chosen = [ordered[i] for i in rng.choice(len(ordered), size=k, replace=False)]
    for iid in chosen:
        pool.unlabeled.discard(iid)
        pool.queried.append(iid)
    return chosen

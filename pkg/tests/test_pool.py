import numpy as np
import pytest

from annokit.engine import (
    ALConfig,
    EmptyPool,
    Instance,
    MultiTaskModel,
    PoolState,
    SEQUENCE,
    select_queries,
    select_random,
)


class FixedConfidenceModel:
    """Test double exposing preset per-instance confidences."""

    def __init__(self, confs):
        self.confs = confs
        self.heads = {"t": None}

    def confidences(self, inst, agg="mean"):
        return {"t": self.confs[inst.instance_id]}


def _pool_of(confs):
    instances = {iid: Instance(iid, ("tok",)) for iid in confs}
    pool = PoolState(unlabeled=set(confs))
    return FixedConfidenceModel(confs), pool, instances


def brute_force_k_smallest(confs, k):
    """Oracle: full sort by (confidence, id)."""
    ranked = sorted(confs.items(), key=lambda kv: (kv[1], kv[0]))
    return [iid for iid, _ in ranked[:k]]


def test_select_lowest_confidence():
    model, pool, instances = _pool_of({"a": 0.9, "b": 0.4, "c": 0.6})
    got = select_queries(model, pool, ALConfig(query_batch_k=2), instances)
    assert got == ["b", "c"]
    assert pool.queried == ["b", "c"]
    assert pool.unlabeled == {"a"}


def test_ties_broken_by_ascending_id():
    model, pool, instances = _pool_of({"d": 0.5, "b": 0.5, "c": 0.5, "a": 0.5})
    got = select_queries(model, pool, ALConfig(query_batch_k=2), instances)
    assert got == ["a", "b"]


def test_k_larger_than_pool_returns_all():
    model, pool, instances = _pool_of({"a": 0.7, "b": 0.3})
    got = select_queries(model, pool, ALConfig(query_batch_k=10), instances)
    assert got == ["b", "a"]
    assert pool.unlabeled == set()


def test_empty_pool_raises():
    model, pool, instances = _pool_of({})
    with pytest.raises(EmptyPool):
        select_queries(model, pool, ALConfig(), instances)


def test_matches_brute_force_oracle_on_random_pools():
    rng = np.random.default_rng(123)
    for trial in range(100):
        n = int(rng.integers(1, 1001))
        k = int(rng.integers(1, 40))
        confs = {int(i): float(np.round(rng.uniform(0, 1), 3)) for i in range(n)}
        model, pool, instances = _pool_of(confs)
        got = select_queries(model, pool, ALConfig(query_batch_k=k), instances)
        assert got == brute_force_k_smallest(confs, min(k, n)), f"trial {trial}"


def test_multi_task_confidence_is_mean_over_tasks():
    tasks = {"t1": (("A", "B"), SEQUENCE), "t2": (("X", "Y"), SEQUENCE)}
    model = MultiTaskModel.create(tasks, feature_dim=4, n_buckets=64, seed=0)
    rng = np.random.default_rng(0)
    for head in model.heads.values():
        head.weights[...] = rng.normal(size=head.weights.shape)
    instances = {i: Instance(i, (f"w{i}", "x")) for i in range(6)}
    pool = PoolState(unlabeled=set(instances))
    got = select_queries(model, pool, ALConfig(query_batch_k=3), instances)

    def mean_conf(inst):
        confs = model.confidences(inst)
        return (confs["t1"] + confs["t2"]) / 2

    expect = sorted(instances, key=lambda i: (mean_conf(instances[i]), i))[:3]
    assert got == expect


def test_mark_labeled_keeps_sets_disjoint():
    pool = PoolState(unlabeled={1, 2, 3})
    pool.queried.extend([1, 2])
    pool.unlabeled -= {1, 2}
    pool.mark_labeled(1)
    assert pool.labeled & pool.unlabeled == set()
    assert pool.pending == [2]


def test_select_random_deterministic_and_disjoint():
    rng1 = np.random.default_rng(5)
    rng2 = np.random.default_rng(5)
    p1 = PoolState(unlabeled=set(range(50)))
    p2 = PoolState(unlabeled=set(range(50)))
    got1 = select_random(p1, 10, rng1)
    got2 = select_random(p2, 10, rng2)
    assert got1 == got2
    assert len(set(got1)) == 10
    assert set(got1) & p1.unlabeled == set()

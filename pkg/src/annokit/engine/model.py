"""Shared-extractor multi-task model with per-task linear heads.

One extractor forward pass per instance serves every head. Training runs
plain mini-batch gradient descent on the weighted joint loss
``L = sum_i alpha_i * L_i`` where each ``L_i`` is cross-entropy averaged over
labeled positions, then over the instances that carry labels for task i.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    MissingAlpha,
    NoLabeledData,
    NonFiniteInput,
    UnknownLabel,
    UnknownTask,
    UntrainedModel,
)
from .features import HashedFeatureExtractor

SEQUENCE = "sequence"
CLASSIFICATION = "classification"

# sequence labels may be None at masked positions (e.g. demographic pseudo-tokens)
LabelValue = Union[str, Sequence[Optional[str]]]


@dataclass(frozen=True)
class Instance:
    """One annotatable unit: tokens plus whatever gold labels exist so far."""

    instance_id: Any
    tokens: tuple[str, ...]
    labels: dict[str, LabelValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("instance requires at least one token")

    def with_labels(self, labels: dict[str, LabelValue]) -> "Instance":
        merged = dict(self.labels)
        merged.update(labels)
        return Instance(self.instance_id, self.tokens, merged)


@dataclass
class TaskHead:
    task_id: str
    label_set: tuple[str, ...]
    kind: str  # SEQUENCE or CLASSIFICATION
    weights: np.ndarray  # (n_labels, feature_dim)
    bias: np.ndarray  # (n_labels,)

    def __post_init__(self):
        if len(self.label_set) < 2:
            raise ValueError("a task head needs at least 2 labels")
        if self.kind not in (SEQUENCE, CLASSIFICATION):
            raise ValueError(f"unknown head kind {self.kind!r}")

    def label_index(self, label: str) -> int:
        try:
            return self.label_set.index(label)
        except ValueError:
            raise UnknownLabel(f"label {label!r} not in task {self.task_id!r}") from None

    def clone(self) -> "TaskHead":
        return TaskHead(self.task_id, self.label_set, self.kind,
                        self.weights.copy(), self.bias.copy())


@dataclass
class ALConfig:
    """Active-learning knobs; alphas default to 1.0 per task."""

    alphas: dict[str, float] = field(default_factory=dict)
    query_batch_k: int = 10
    retrain_every: int = 10
    learning_rate: float = 0.5
    epochs: int = 10
    batch_size: int = 16
    seed: int = 0
    confidence_agg: str = "mean"  # or "min"

    def alpha(self, task_id: str) -> float:
        return self.alphas.get(task_id, 1.0)


@dataclass
class TrainingStats:
    loss_curves: dict[str, list[float]]
    wall_clock_s: float
    forward_passes: int
    epochs: int


def softmax(logits) -> np.ndarray:
    """Probabilities via max-shifted exponentials; rejects non-finite input."""
    arr = np.asarray(logits, dtype=np.float64)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"logits must be finite, got {logits!r}")
    shifted = arr - arr.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def joint_loss(losses: Mapping[str, float], alphas: Mapping[str, float]) -> float:
    """Weighted sum over per-task losses."""
    missing = set(losses) - set(alphas)
    if missing:
        raise MissingAlpha(f"no alpha for tasks {sorted(missing)}")
    return sum(alphas[t] * losses[t] for t in losses)


class MultiTaskModel:
    """Shared extractor plus one linear head per task."""

    def __init__(self, extractor, heads: dict[str, TaskHead]):
        dims = {h.weights.shape[1] for h in heads.values()}
        if dims and dims != {extractor.feature_dim}:
            raise ValueError("all heads must consume the extractor's feature_dim")
        self.extractor = extractor
        self.heads = heads
        self.trained = False
        self.forward_count = 0

    @classmethod
    def create(
        cls,
        tasks: dict[str, tuple[Sequence[str], str]],
        feature_dim: int = 32,
        n_buckets: int = 2**15,
        seed: int = 0,
        extractor=None,
    ) -> "MultiTaskModel":
        """New model; `tasks` maps task_id -> (label_set, kind)."""
        if extractor is None:
            extractor = HashedFeatureExtractor(
                feature_dim=feature_dim, n_buckets=n_buckets, hash_seed=seed, init_seed=seed
            )
        heads = {}
        for task_id, (label_set, kind) in sorted(tasks.items()):
            heads[task_id] = TaskHead(
                task_id=task_id,
                label_set=tuple(label_set),
                kind=kind,
                weights=np.zeros((len(label_set), extractor.feature_dim)),
                bias=np.zeros(len(label_set)),
            )
        return cls(extractor, heads)

    def clone(self) -> "MultiTaskModel":
        out = MultiTaskModel(self.extractor.clone(),
                             {t: h.clone() for t, h in self.heads.items()})
        out.trained = self.trained
        out.forward_count = self.forward_count
        return out

    def head(self, task_id: str) -> TaskHead:
        try:
            return self.heads[task_id]
        except KeyError:
            raise UnknownTask(f"no head for task {task_id!r}") from None

    def params(self) -> dict[str, np.ndarray]:
        out = dict(self.extractor.params())
        for task_id, h in self.heads.items():
            out[f"head.{task_id}.weights"] = h.weights
            out[f"head.{task_id}.bias"] = h.bias
        return out

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {name: np.zeros_like(arr) for name, arr in self.params().items()}

    def forward_features(self, inst: Instance) -> tuple[np.ndarray, dict]:
        self.forward_count += 1
        return self.extractor.forward(inst.tokens)

    # -- prediction ---------------------------------------------------------

    def _task_probs(self, x: np.ndarray, head: TaskHead) -> np.ndarray:
        if head.kind == CLASSIFICATION:
            logits = head.weights @ x.mean(axis=0) + head.bias
            return softmax(logits)
        logits = x @ head.weights.T + head.bias
        return softmax(logits)

    def predict(self, inst: Instance) -> dict[str, tuple[Any, float, np.ndarray]]:
        """Per task: (labels, confidence-by-mean, per-token max-prob vector)."""
        x, _ = self.forward_features(inst)
        out = {}
        for task_id, head in self.heads.items():
            probs = self._task_probs(x, head)
            if head.kind == CLASSIFICATION:
                idx = int(np.argmax(probs))
                out[task_id] = (head.label_set[idx], float(probs[idx]),
                                np.array([probs[idx]]))
            else:
                idxs = np.argmax(probs, axis=1)
                labels = tuple(head.label_set[i] for i in idxs)
                token_max = probs[np.arange(len(idxs)), idxs]
                out[task_id] = (labels, float(token_max.mean()), token_max)
        return out

    def confidences(self, inst: Instance, agg: str = "mean") -> dict[str, float]:
        """Per-task confidence of the best labeling, one extractor pass."""
        preds = self.predict(inst)
        out = {}
        for task_id, (_, _, token_max) in preds.items():
            if agg == "min":
                out[task_id] = float(token_max.min())
            else:
                out[task_id] = float(token_max.mean())
        return out

    # -- loss / gradients ---------------------------------------------------

    def loss_and_grads(
        self, instances: Sequence[Instance], alphas: Mapping[str, float] | None = None
    ) -> tuple[dict[str, float], dict[str, np.ndarray]]:
        """Per-task mean losses over the batch and the alpha-weighted gradient
        of their joint sum. One extractor forward per instance."""
        if alphas is None:
            alphas = {t: 1.0 for t in self.heads}
        counts = {t: 0 for t in self.heads}
        for inst in instances:
            for t in inst.labels:
                if t in counts:
                    counts[t] += 1
        losses = {t: 0.0 for t in self.heads}
        grads = self.zero_grads()

        for inst in instances:
            x, cache = self.forward_features(inst)
            dx = np.zeros_like(x)
            touched = False
            for task_id, head in self.heads.items():
                label = inst.labels.get(task_id)
                if label is None:
                    continue
                n_task = counts[task_id]
                scale = alphas.get(task_id, 1.0) / n_task
                g_w = grads[f"head.{task_id}.weights"]
                g_b = grads[f"head.{task_id}.bias"]
                if head.kind == CLASSIFICATION:
                    xbar = x.mean(axis=0)
                    probs = softmax(head.weights @ xbar + head.bias)
                    y = head.label_index(label)
                    losses[task_id] += -np.log(probs[y]) / n_task
                    dlogits = probs.copy()
                    dlogits[y] -= 1.0
                    g_w += scale * np.outer(dlogits, xbar)
                    g_b += scale * dlogits
                    dx += scale * (head.weights.T @ dlogits) / len(inst.tokens)
                else:
                    if len(label) != len(inst.tokens):
                        raise ValueError(
                            f"label sequence length {len(label)} != token count "
                            f"{len(inst.tokens)} for task {task_id!r}"
                        )
                    mask = np.array([l is not None for l in label])
                    n_pos = int(mask.sum())
                    if n_pos == 0:
                        continue
                    probs = softmax(x @ head.weights.T + head.bias)
                    ys = np.array([head.label_index(l) for l in label if l is not None])
                    rows = np.flatnonzero(mask)
                    losses[task_id] += float(
                        -np.log(probs[rows, ys]).mean()
                    ) / n_task
                    dlogits = probs[rows]
                    dlogits[np.arange(len(rows)), ys] -= 1.0
                    dlogits /= n_pos
                    g_w += scale * dlogits.T @ x[rows]
                    g_b += scale * dlogits.sum(axis=0)
                    dx[rows] += scale * dlogits @ head.weights
                touched = True
            if touched and self.extractor.trainable:
                self.extractor.backward(cache, dx, grads)
        return losses, grads


def instance_confidence(
    model: MultiTaskModel, inst: Instance, task_id: str, agg: str = "mean"
) -> float:
    """Confidence of the model's best labeling for one task."""
    model.head(task_id)
    return model.confidences(inst, agg)[task_id]


def suggest(model: MultiTaskModel, inst: Instance, agg: str = "mean") -> dict[str, tuple]:
    """Per task: (predicted labels, confidence). Requires a trained model."""
    if not model.trained:
        raise UntrainedModel("model has not been trained yet")
    preds = model.predict(inst)
    confs = {}
    for task_id, (labels, _, token_max) in preds.items():
        conf = float(token_max.min()) if agg == "min" else float(token_max.mean())
        confs[task_id] = (labels, conf)
    return confs


def train(
    model: MultiTaskModel, instances: Sequence[Instance], cfg: ALConfig
) -> tuple[MultiTaskModel, TrainingStats]:
    """Gradient-descent training on a private copy; deterministic per seed."""
    usable = [inst for inst in instances if any(t in model.heads for t in inst.labels)]
    if not usable:
        raise NoLabeledData("no instance carries labels for any known task")
    usable.sort(key=lambda inst: str(inst.instance_id))

    out = model.clone()
    rng = np.random.default_rng(cfg.seed)
    params = out.params()
    curves: dict[str, list[float]] = {t: [] for t in out.heads}
    passes_before = out.forward_count
    t0 = time.perf_counter()

    for _ in range(cfg.epochs):
        perm = rng.permutation(len(usable))
        epoch_loss = {t: 0.0 for t in out.heads}
        epoch_weight = {t: 0 for t in out.heads}
        for start in range(0, len(usable), cfg.batch_size):
            batch = [usable[i] for i in perm[start:start + cfg.batch_size]]
            losses, grads = out.loss_and_grads(batch, cfg.alphas or None)
            for t, loss in losses.items():
                n = sum(1 for inst in batch if t in inst.labels)
                epoch_loss[t] += loss * n
                epoch_weight[t] += n
            for name, grad in grads.items():
                params[name] -= cfg.learning_rate * grad
        for t in out.heads:
            curves[t].append(epoch_loss[t] / epoch_weight[t] if epoch_weight[t] else 0.0)

    out.trained = True
    stats = TrainingStats(
        loss_curves=curves,
        wall_clock_s=time.perf_counter() - t0,
        forward_passes=out.forward_count - passes_before,
        epochs=cfg.epochs,
    )
    return out, stats

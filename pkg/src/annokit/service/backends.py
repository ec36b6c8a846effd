"""Per-task suggestion back-ends wired between the store and the engines.

Each task with a suggestion back-end gets a manager that ingests submissions
into a labeled pool, retrains asynchronously every ``retrain_every`` labels
(publishing an immutable snapshot the serving path reads lock-free), and maps
model predictions back into per-component result values.
"""

from __future__ import annotations

import logging
import threading
import time
from typing import Any, Callable

logger = logging.getLogger(__name__)

from ..bridge import (
    bindings_from_config,
    gold_labels_for,
    instance_from_source,
    model_tasks,
    results_from_predictions,
)
from ..demographics import (
    DemographicProfile,
    FeatureDeclaration,
    augment,
    suggest_for_annotator,
)
from ..engine import ALConfig, Instance, MultiTaskModel, UntrainedModel, suggest, train
from ..engine.model import SEQUENCE
from ..prompting import (
    ApiConfig,
    CompletionClient,
    FewShotExample,
    HashedBowEmbedder,
    PromptError,
    build_prompt,
    parse_tags,
    select_random,
    select_similar,
)
from ..store import AnnotationStore, TaskInfo

BACKEND_NONE = "none"
BACKEND_MTAL = "mtal"
BACKEND_DEMOGRAPHIC = "demographic_al"
BACKEND_PROMPT = "prompt"


def al_config_from(config: dict[str, Any]) -> ALConfig:
    al = config.get("al", {})
    cfg = ALConfig()
    for field_name in (
        "alphas", "query_batch_k", "retrain_every", "learning_rate",
        "epochs", "batch_size", "seed", "confidence_agg",
    ):
        if field_name in al:
            setattr(cfg, field_name, al[field_name])
    return cfg


class ModelBackend:
    """Shared-extractor model backend (multi-task, optionally demographic)."""

    def __init__(self, task: TaskInfo, store: AnnotationStore, demographic: bool):
        self.task_id = task.task_id
        self.store = store
        self.demographic = demographic
        self.bindings = bindings_from_config(task.backend_config, task.interface)
        if not self.bindings:
            raise ValueError(f"task {task.task_id!r} has no task_map bindings")
        self.cfg = al_config_from(task.backend_config)
        al = task.backend_config.get("al", {})
        self.model = MultiTaskModel.create(
            model_tasks(self.bindings),
            feature_dim=al.get("feature_dim", 32),
            n_buckets=al.get("n_buckets", 2**15),
            seed=self.cfg.seed,
        )
        self.snapshot: MultiTaskModel | None = None
        self.snapshot_version = 0
        if demographic:
            demo = task.backend_config.get("demographics", {})
            self.declaration = FeatureDeclaration(
                names=tuple(demo.get("features", ["age"])),
                buckets=dict(demo.get("buckets", {})),
            )
        else:
            self.declaration = None
        self.labeled: dict[Any, Any] = {}
        self.submit_count = 0
        self._lock = threading.Lock()
        self._training = False
        self._retrain_queued = False
        self._replay(task)

    # -------------------------------------------------------------- ingest

    def _profile_of(self, annotator_id: str) -> DemographicProfile:
        user = self.store.get_user(annotator_id)
        return DemographicProfile.from_dict(user.demographics, self.declaration.names)

    def _ingest(self, task: TaskInfo, index: int, results: list, annotator_id: str | None):
        inst = instance_from_source(index, task.document.source[index])
        if inst is None:
            return False
        labels = {}
        for binding in self.bindings:
            gold = gold_labels_for(binding, task.interface, task.document.source[index], results)
            if gold is not None:
                labels[binding.task_id] = gold
        if not labels:
            return False
        inst = inst.with_labels(labels)
        key: Any = index
        if self.demographic:
            if annotator_id is None:
                return False
            inst = augment(
                Instance(f"{index}:{annotator_id}", inst.tokens, inst.labels),
                self._profile_of(annotator_id),
                self.declaration,
            )
            key = (index, annotator_id)
        with self._lock:
            self.labeled[key] = inst
        return True

    def _replay(self, task: TaskInfo):
        for record in self.store.latest_records(task.task_id):
            if self._ingest(task, record["instance_index"], record["results"],
                            record["annotator_id"]):
                self.submit_count += 1
        if self.submit_count and self.submit_count >= self.cfg.retrain_every:
            self._schedule_retrain()

    def on_submit(self, task: TaskInfo, index: int, results: list, annotator_id: str):
        if not self._ingest(task, index, results, annotator_id):
            return
        self.submit_count += 1
        if self.submit_count % self.cfg.retrain_every == 0:
            self._schedule_retrain()

    # ------------------------------------------------------------ training

    def _schedule_retrain(self):
        with self._lock:
            if self._training:
                self._retrain_queued = True
                return
            self._training = True
        threading.Thread(target=self._train_loop, daemon=True).start()

    def _train_loop(self):
        while True:
            with self._lock:
                data = list(self.labeled.values())
            if data:
                base = self.snapshot if self.snapshot is not None else self.model
                trained, stats = train(base, data, self.cfg)
                with self._lock:
                    self.snapshot = trained  # atomic swap
                    self.snapshot_version += 1
                logger.info("task %s: published snapshot-%d (%d labeled, %.2fs)",
                            self.task_id, self.snapshot_version, len(data),
                            stats.wall_clock_s)
            with self._lock:
                if not self._retrain_queued:
                    self._training = False
                    return
                self._retrain_queued = False

    def join_idle(self, timeout: float = 30.0) -> bool:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                if not self._training:
                    return True
            time.sleep(0.01)
        return False

    # ------------------------------------------------------------- serving

    def suggestion(self, task: TaskInfo, index: int, annotator_id: str) -> dict | None:
        snapshot = self.snapshot
        if snapshot is None:
            return None
        probe = instance_from_source(index, task.document.source[index])
        if probe is None:
            return None
        try:
            if self.demographic:
                preds = suggest_for_annotator(
                    snapshot, probe, self._profile_of(annotator_id), self.declaration,
                    agg=self.cfg.confidence_agg,
                )
            else:
                preds = suggest(snapshot, probe, agg=self.cfg.confidence_agg)
        except UntrainedModel:
            return None
        results = results_from_predictions(
            self.bindings, task.interface, task.document.source[index], preds
        )
        confs = [conf for _, conf in preds.values()]
        return {
            "backend": BACKEND_DEMOGRAPHIC if self.demographic else BACKEND_MTAL,
            "results": results,
            "confidence": sum(confs) / len(confs) if confs else None,
            "provenance": f"snapshot-{self.snapshot_version}",
        }


class PromptBackend:
    """Few-shot LLM backend over one bound sequence task."""

    def __init__(
        self,
        task: TaskInfo,
        store: AnnotationStore,
        client_factory: Callable[[dict], Any] | None = None,
    ):
        self.task_id = task.task_id
        self.store = store
        bindings = bindings_from_config(task.backend_config, task.interface)
        seq = [b for b in bindings if b.kind == SEQUENCE]
        if not seq:
            raise ValueError("prompt backend requires a sequence task_map binding")
        self.binding = seq[0]
        prompt_cfg = task.backend_config.get("prompt", {})
        self.task_name = prompt_cfg.get("task_name", "tags")
        self.n_examples = prompt_cfg.get("n_examples", 5)
        self.strategy = prompt_cfg.get("strategy", "random")
        self.seed = prompt_cfg.get("seed", 0)
        self.max_sentence_tokens = prompt_cfg.get("max_sentence_tokens")
        self.embedder = HashedBowEmbedder(seed=self.seed)
        if client_factory is not None:
            self.client = client_factory(prompt_cfg)
        else:
            self.client = CompletionClient(
                ApiConfig(
                    endpoint=prompt_cfg.get("endpoint", ""),
                    model=prompt_cfg.get("model", ""),
                    max_tokens=prompt_cfg.get("max_tokens", 256),
                    temperature=prompt_cfg.get("temperature", 0.0),
                    context_char_limit=prompt_cfg.get("context_char_limit", 12000),
                    api_key_env=prompt_cfg.get("api_key_env", "ANNOKIT_API_KEY"),
                ),
                audit_path=prompt_cfg.get("audit_path"),
            )
        self.examples: dict[int, FewShotExample] = {}
        self.query_count = 0
        self._replay(task)

    def _replay(self, task: TaskInfo):
        for record in self.store.latest_records(task.task_id):
            self.on_submit(task, record["instance_index"], record["results"], None)

    def on_submit(self, task: TaskInfo, index: int, results: list, annotator_id):
        source = task.document.source[index]
        gold = gold_labels_for(self.binding, task.interface, source, results)
        if gold is None or not isinstance(source, str):
            return
        self.examples[index] = FewShotExample(
            sentence=source, answer=" ".join(gold), task_name=self.task_name
        )

    def join_idle(self, timeout: float = 0.0) -> bool:
        return True

    def suggestion(self, task: TaskInfo, index: int, annotator_id: str) -> dict | None:
        source = task.document.source[index]
        probe = instance_from_source(index, source)
        if probe is None or not self.examples:
            return None
        pool = [self.examples[k] for k in sorted(self.examples)]
        n = min(self.n_examples, len(pool))
        try:
            if self.strategy == "similar":
                chosen = select_similar(pool, source, n, self.embedder,
                                        max_sentence_tokens=self.max_sentence_tokens)
            else:
                chosen = select_random(pool, n, self.seed + index,
                                       max_sentence_tokens=self.max_sentence_tokens)
            prompt = build_prompt(chosen, source, self.task_name)
            completion = self.client.query(prompt)
        except PromptError:
            return None
        tags, _mismatch = parse_tags(completion, len(probe.tokens))
        self.query_count += 1
        results = results_from_predictions(
            [self.binding], task.interface, source, {self.binding.task_id: (tags, None)}
        )
        return {
            "backend": BACKEND_PROMPT,
            "results": results,
            "confidence": None,
            "provenance": f"prompt-{self.query_count}",
        }


class BackendManager:
    """Registry of per-task back-ends; store listener + suggestion provider."""

    def __init__(self, store: AnnotationStore, client_factory=None):
        self.store = store
        self.client_factory = client_factory
        self._backends: dict[str, Any] = {}
        self._lock = threading.Lock()
        store.suggestion_provider = self._suggest
        store.submit_listeners.append(self._on_submit)

    def _get(self, task: TaskInfo):
        with self._lock:
            backend = self._backends.get(task.task_id)
            if backend is None:
                if task.backend == BACKEND_MTAL:
                    backend = ModelBackend(task, self.store, demographic=False)
                elif task.backend == BACKEND_DEMOGRAPHIC:
                    backend = ModelBackend(task, self.store, demographic=True)
                elif task.backend == BACKEND_PROMPT:
                    backend = PromptBackend(task, self.store, self.client_factory)
                else:
                    backend = None
                self._backends[task.task_id] = backend
        return backend

    def _suggest(self, task: TaskInfo, index: int, annotator_id: str) -> dict | None:
        backend = self._get(task)
        if backend is None:
            return None
        return backend.suggestion(task, index, annotator_id)

    def _on_submit(self, task: TaskInfo, index: int, results: list, annotator_id: str):
        # the record is already committed; a back-end hiccup must not fail it
        try:
            backend = self._get(task)
            if backend is not None:
                backend.on_submit(task, index, results, annotator_id)
        except Exception:
            logger.exception("suggestion back-end failed to ingest a submission "
                             "(task %s, instance %s)", task.task_id, index)

    def join_idle(self, task_id: str | None = None, timeout: float = 30.0) -> bool:
        with self._lock:
            backends = [
                b for t, b in self._backends.items()
                if b is not None and (task_id is None or t == task_id)
            ]
        return all(b.join_idle(timeout) for b in backends)

    def snapshot_version(self, task_id: str) -> int | None:
        backend = self._backends.get(task_id)
        return getattr(backend, "snapshot_version", None)

"""Experiment scenarios: serve -> simulated annotate -> retrain -> evaluate.

Each scenario runs per seed, retrains from scratch every round (deterministic
given the seed), and writes per-round CSV reports, learning-curve plots, and
a JSON summary. Wall-clock timings go to a separate file so the CSV reports
stay bitwise reproducible.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..demographics import DemographicProfile, FeatureDeclaration, augment
from ..engine import (
    ALConfig,
    CLASSIFICATION,
    Instance,
    MultiTaskModel,
    PoolState,
    SEQUENCE,
    select_queries,
    select_random,
    train,
)
from ..prompting import (
    FewShotExample,
    HashedBowEmbedder,
    build_prompt,
    parse_tags,
    select_random as select_random_examples,
    select_similar,
    target_sentence_of,
)
from .annotator import SimulatedAnnotator
from .corpus import (
    CHUNK_TASK,
    ENTITY_TASK,
    SENTIMENT_LABELS,
    SentimentCorpusParams,
    SeqCorpus,
    SeqCorpusParams,
    generate_sentiment_corpus,
    generate_sequence_corpus,
    read_conll,
)
from .metrics import classification_accuracy, evaluate_sequence_labeling

SCENARIOS = ("mtal_vs_single", "al_vs_random", "demographic", "prompt_eval")


@dataclass
class SimConfig:
    scenario: str
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    budget: int = 500
    query_k: int = 25
    seed_set: int = 20
    epochs: int = 10
    learning_rate: float = 2.0
    batch_size: int = 16
    feature_dim: int = 32
    n_buckets: int = 2**15
    alphas: dict = field(default_factory=dict)
    confidence_agg: str = "mean"
    noise_rate: float = 0.0
    corpus_path: Optional[str] = None  # CoNLL file; synthetic when absent
    corpus_params: SeqCorpusParams = field(default_factory=SeqCorpusParams)
    sentiment_params: SentimentCorpusParams = field(default_factory=SentimentCorpusParams)
    # demographic scenario training knobs (the age interaction needs many
    # small plain-GD steps to fit; calibrated once on the frozen generator)
    demo_epochs_augmented: int = 130
    demo_epochs_statement: int = 40
    demo_learning_rate: float = 0.5
    demo_batch_augmented: int = 8
    # prompt_eval knobs
    strategy: str = "random"
    n_examples: int = 5
    mock_llm: Optional[str] = None  # "gold" | "all-o"
    n_eval: int = 120
    out_dir: Path = Path("sim-out")

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")


def _al_config(cfg: SimConfig, seed: int) -> ALConfig:
    return ALConfig(
        alphas=dict(cfg.alphas),
        query_batch_k=cfg.query_k,
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        seed=seed,
        confidence_agg=cfg.confidence_agg,
    )


def _load_corpus(cfg: SimConfig, seed: int) -> SeqCorpus:
    if cfg.corpus_path:
        instances, label_sets = read_conll(cfg.corpus_path)
        rng = np.random.default_rng(seed)
        order = rng.permutation(len(instances))
        n_heldout = max(1, len(instances) // 5)
        heldout = [instances[i] for i in order[:n_heldout]]
        train_pool = [instances[i] for i in order[n_heldout:]]
        return SeqCorpus(train=train_pool, heldout=heldout,
                         label_sets=label_sets, params=cfg.corpus_params)
    return generate_sequence_corpus(cfg.corpus_params, seed=1000 + seed)


def _evaluate_tasks(model: MultiTaskModel, heldout: list[Instance], tasks) -> dict:
    preds: dict[str, list] = {t: [] for t in tasks}
    for inst in heldout:
        out = model.predict(inst)
        for t in tasks:
            preds[t].append(list(out[t][0]))
    scores = {}
    for t in tasks:
        golds = [list(h.labels[t]) for h in heldout]
        scores[t] = evaluate_sequence_labeling(preds[t], golds).as_dict()
    return scores


@dataclass
class RoundRow:
    setting: str
    seed: int
    round: int
    labeled_count: int
    task: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    forward_passes: int


def _al_loop(cfg: SimConfig, corpus: SeqCorpus, tasks: dict, seed: int,
             strategy: str, setting: str, timings: list) -> list[RoundRow]:
    """One active-learning run, retraining from scratch each round."""
    instances = {}
    for inst in corpus.train:
        labels = {t: inst.labels[t] for t in tasks}
        instances[inst.instance_id] = Instance(inst.instance_id, inst.tokens, labels)
    annotator = SimulatedAnnotator(
        gold={i.instance_id: i.labels for i in corpus.train},
        label_sets=corpus.label_sets,
        noise_rate=cfg.noise_rate,
        seed=seed,
    )
    pool = PoolState(unlabeled=set(instances))
    rng = np.random.default_rng(seed + 7919)
    al_cfg = _al_config(cfg, seed)
    base = MultiTaskModel.create(
        {t: (corpus.label_sets[t], SEQUENCE) for t in tasks},
        feature_dim=cfg.feature_dim, n_buckets=cfg.n_buckets, seed=seed,
    )
    labeled_ids = select_random(pool, min(cfg.seed_set, len(instances)), rng)
    for iid in labeled_ids:
        pool.mark_labeled(iid)
    labeled = [
        instances[iid].with_labels(
            {t: annotator.labels_for(iid, t) for t in tasks}
        )
        for iid in labeled_ids
    ]
    rows: list[RoundRow] = []
    passes = 0
    round_no = 0
    t0 = time.perf_counter()
    while True:
        model, stats = train(base, labeled, al_cfg)
        passes += stats.forward_passes
        scores = _evaluate_tasks(model, corpus.heldout, tasks)
        for t, s in scores.items():
            rows.append(RoundRow(setting, seed, round_no, len(labeled), t,
                                 s["accuracy"], s["precision"], s["recall"], s["f1"],
                                 passes))
        if len(labeled) >= min(cfg.budget, len(instances)):
            break
        if strategy == "lc":
            new_ids = select_queries(model, pool, al_cfg, instances)
        else:
            new_ids = select_random(pool, al_cfg.query_batch_k, rng)
        for iid in new_ids:
            pool.mark_labeled(iid)
            labeled.append(
                instances[iid].with_labels(
                    {t: annotator.labels_for(iid, t) for t in tasks}
                )
            )
        round_no += 1
    timings.append({"setting": setting, "seed": seed,
                    "wall_clock_s": time.perf_counter() - t0})
    return rows


def area_under_curve(rows: list[RoundRow], task: str, metric: str = "f1") -> float:
    pts = sorted((r.labeled_count, getattr(r, metric)) for r in rows if r.task == task)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return float(np.trapezoid(ys, xs))


# ------------------------------------------------------------- scenarios

def run_al_vs_random(cfg: SimConfig) -> dict:
    rows: list[RoundRow] = []
    timings: list[dict] = []
    summary = {"scenario": "al_vs_random", "seeds": [], "wins_lc": 0}
    for seed in cfg.seeds:
        corpus = _load_corpus(cfg, seed)
        tasks = {ENTITY_TASK: corpus.label_sets[ENTITY_TASK]}
        lc = _al_loop(cfg, corpus, tasks, seed, "lc", "least_confidence", timings)
        rnd = _al_loop(cfg, corpus, tasks, seed, "random", "random", timings)
        rows += lc + rnd
        auc_lc = area_under_curve(lc, ENTITY_TASK)
        auc_rand = area_under_curve(rnd, ENTITY_TASK)
        summary["seeds"].append(
            {"seed": seed, "auc_least_confidence": auc_lc, "auc_random": auc_rand}
        )
        summary["wins_lc"] += int(auc_lc > auc_rand)
    _write_outputs(cfg, rows, timings, summary)
    return summary


def run_mtal_vs_single(cfg: SimConfig) -> dict:
    rows: list[RoundRow] = []
    timings: list[dict] = []
    summary = {"scenario": "mtal_vs_single", "seeds": []}
    for seed in cfg.seeds:
        corpus = _load_corpus(cfg, seed)
        both = {t: corpus.label_sets[t] for t in (CHUNK_TASK, ENTITY_TASK)}
        joint = _al_loop(cfg, corpus, both, seed, "lc", "joint", timings)
        single_rows = {}
        for t in (CHUNK_TASK, ENTITY_TASK):
            single_rows[t] = _al_loop(
                cfg, corpus, {t: corpus.label_sets[t]}, seed, "lc", f"single_{t}", timings
            )
        rows += joint + single_rows[CHUNK_TASK] + single_rows[ENTITY_TASK]

        def final(rs, task):
            last = max(r.round for r in rs)
            return next(r for r in rs if r.round == last and r.task == task)

        joint_passes = max(r.forward_passes for r in joint)
        single_passes = sum(
            max(r.forward_passes for r in single_rows[t])
            for t in (CHUNK_TASK, ENTITY_TASK)
        )
        entry = {
            "seed": seed,
            "forward_passes_joint": joint_passes,
            "forward_passes_single_sum": single_passes,
            "pass_ratio": joint_passes / single_passes,
        }
        for t in (CHUNK_TASK, ENTITY_TASK):
            entry[f"f1_joint_{t}"] = final(joint, t).f1
            entry[f"f1_single_{t}"] = final(single_rows[t], t).f1
        summary["seeds"].append(entry)
    for t in (CHUNK_TASK, ENTITY_TASK):
        summary[f"mean_f1_joint_{t}"] = float(
            np.mean([s[f"f1_joint_{t}"] for s in summary["seeds"]])
        )
        summary[f"mean_f1_single_{t}"] = float(
            np.mean([s[f"f1_single_{t}"] for s in summary["seeds"]])
        )
    summary["mean_pass_ratio"] = float(
        np.mean([s["pass_ratio"] for s in summary["seeds"]])
    )
    _write_outputs(cfg, rows, timings, summary)
    return summary


def run_demographic(cfg: SimConfig) -> dict:
    declaration = FeatureDeclaration(names=("age",))
    rows = []
    timings: list[dict] = []
    summary = {"scenario": "demographic", "seeds": []}
    for seed in cfg.seeds:
        corpus = generate_sentiment_corpus(cfg.sentiment_params, seed=2000 + seed)
        t0 = time.perf_counter()
        statement_only = []
        augmented = []
        for ev in corpus.train:
            inst = Instance(ev.event_id, ev.tokens, {"sentiment": ev.label})
            statement_only.append(inst)
            augmented.append(
                augment(inst, DemographicProfile.from_dict({"age": ev.age}), declaration)
            )
        tasks = {"sentiment": (SENTIMENT_LABELS, CLASSIFICATION)}
        base = MultiTaskModel.create(tasks, feature_dim=cfg.feature_dim,
                                     n_buckets=cfg.n_buckets, seed=seed)
        model_stmt, _ = train(
            base, statement_only,
            ALConfig(learning_rate=cfg.demo_learning_rate,
                     epochs=cfg.demo_epochs_statement,
                     batch_size=cfg.batch_size, seed=seed),
        )
        model_aug, _ = train(
            base, augmented,
            ALConfig(learning_rate=cfg.demo_learning_rate,
                     epochs=cfg.demo_epochs_augmented,
                     batch_size=cfg.demo_batch_augmented, seed=seed),
        )

        golds = [ev.label for ev in corpus.heldout]
        preds_stmt = [
            model_stmt.predict(Instance(ev.event_id, ev.tokens))["sentiment"][0]
            for ev in corpus.heldout
        ]
        preds_aug = []
        for ev in corpus.heldout:
            probe = augment(
                Instance(ev.event_id, ev.tokens),
                DemographicProfile.from_dict({"age": ev.age}), declaration,
            )
            preds_aug.append(model_aug.predict(probe)["sentiment"][0])
        rng = np.random.default_rng(seed)
        preds_random = [
            SENTIMENT_LABELS[i]
            for i in rng.integers(len(SENTIMENT_LABELS), size=len(golds))
        ]
        entry = {
            "seed": seed,
            "accuracy_random": classification_accuracy(preds_random, golds),
            "accuracy_statement_only": classification_accuracy(preds_stmt, golds),
            "accuracy_with_age": classification_accuracy(preds_aug, golds),
            "bayes_statement_only": corpus.bayes_statement_only_accuracy(),
        }
        summary["seeds"].append(entry)
        timings.append({"setting": "demographic", "seed": seed,
                        "wall_clock_s": time.perf_counter() - t0})
    for key in ("accuracy_random", "accuracy_statement_only", "accuracy_with_age",
                "bayes_statement_only"):
        summary[f"mean_{key}"] = float(np.mean([s[key] for s in summary["seeds"]]))
    _write_outputs(cfg, [], timings, summary)
    return summary


class EchoGoldClient:
    """Mock completion API returning the gold answer for the prompt's target."""

    def __init__(self, answers: dict[str, str]):
        self.answers = answers

    def query(self, prompt: str) -> str:
        return f"`` {self.answers[target_sentence_of(prompt)]} ''"


class AllOClient:
    """Mock completion API that predicts "O" for every token."""

    def query(self, prompt: str) -> str:
        n = len(target_sentence_of(prompt).split())
        return "`` " + " ".join(["O"] * n) + " ''"


def run_prompt_eval(cfg: SimConfig) -> dict:
    rows = []
    timings: list[dict] = []
    summary = {"scenario": "prompt_eval", "strategy": cfg.strategy,
               "n_examples": cfg.n_examples, "mock_llm": cfg.mock_llm, "seeds": []}
    for seed in cfg.seeds:
        corpus = _load_corpus(cfg, seed)
        t0 = time.perf_counter()
        pool = [
            FewShotExample(
                sentence=" ".join(inst.tokens),
                answer=" ".join(inst.labels[ENTITY_TASK]),
            )
            for inst in corpus.train[:400]
        ]
        gold_map = {ex.sentence: ex.answer for ex in pool}
        heldout = corpus.heldout[: cfg.n_eval]
        for h in heldout:
            gold_map[" ".join(h.tokens)] = " ".join(h.labels[ENTITY_TASK])
        if cfg.mock_llm in (None, "gold"):
            client = EchoGoldClient(gold_map)
        elif cfg.mock_llm == "all-o":
            client = AllOClient()
        else:
            raise ValueError(f"unknown mock LLM {cfg.mock_llm!r}")
        embedder = HashedBowEmbedder(seed=seed)
        preds, golds = [], []
        mismatches = 0
        for j, inst in enumerate(heldout):
            target = " ".join(inst.tokens)
            if cfg.strategy == "similar":
                chosen = select_similar(pool, target, cfg.n_examples, embedder)
            else:
                chosen = select_random_examples(pool, cfg.n_examples, seed * 10007 + j)
            prompt = build_prompt(chosen, target, "entities-recognition")
            tags, mismatch = parse_tags(client.query(prompt), len(inst.tokens))
            mismatches += mismatch
            preds.append(tags)
            golds.append(list(inst.labels[ENTITY_TASK]))
        scores = evaluate_sequence_labeling(preds, golds)
        o_fraction = sum(t == "O" for g in golds for t in g) / sum(map(len, golds))
        entry = {"seed": seed, "o_fraction": o_fraction,
                 "parse_mismatches": mismatches, **scores.as_dict()}
        summary["seeds"].append(entry)
        rows.append(RoundRow("prompt_eval", seed, 0, len(pool), ENTITY_TASK,
                             scores.accuracy, scores.precision, scores.recall,
                             scores.f1, 0))
        timings.append({"setting": "prompt_eval", "seed": seed,
                        "wall_clock_s": time.perf_counter() - t0})
    for key in ("accuracy", "f1"):
        summary[f"mean_{key}"] = float(np.mean([s[key] for s in summary["seeds"]]))
    _write_outputs(cfg, rows, timings, summary)
    return summary


# --------------------------------------------------------------- outputs

def _write_outputs(cfg: SimConfig, rows: list[RoundRow], timings: list[dict],
                   summary: dict) -> None:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = out / f"{cfg.scenario}_report.csv"
    with open(report, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["setting", "seed", "round", "labeled_count", "task",
                         "accuracy", "precision", "recall", "f1", "forward_passes"])
        for r in rows:
            writer.writerow([r.setting, r.seed, r.round, r.labeled_count, r.task,
                             f"{r.accuracy:.6f}", f"{r.precision:.6f}",
                             f"{r.recall:.6f}", f"{r.f1:.6f}", r.forward_passes])
    with open(out / f"{cfg.scenario}_timings.csv", "w", newline="",
              encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["setting", "seed", "wall_clock_s"])
        for t in timings:
            writer.writerow([t["setting"], t["seed"], f"{t['wall_clock_s']:.3f}"])
    with open(out / f"{cfg.scenario}_summary.json", "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    if rows:
        _plot_curves(cfg, rows, out / f"{cfg.scenario}_curves.png")


def _plot_curves(cfg: SimConfig, rows: list[RoundRow], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    tasks = sorted({r.task for r in rows})
    fig, axes = plt.subplots(1, len(tasks), figsize=(6 * len(tasks), 4), squeeze=False)
    for ax, task in zip(axes[0], tasks):
        for setting in sorted({r.setting for r in rows}):
            pts: dict[int, list[float]] = {}
            for r in rows:
                if r.task == task and r.setting == setting:
                    pts.setdefault(r.labeled_count, []).append(r.f1)
            if not pts:
                continue
            xs = sorted(pts)
            ys = [float(np.mean(pts[x])) for x in xs]
            ax.plot(xs, ys, marker="o", markersize=3, label=setting)
        ax.set_xlabel("labeled instances")
        ax.set_ylabel("entity F1" if task == ENTITY_TASK else f"{task} F1")
        ax.set_title(task)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def run_scenario(cfg: SimConfig) -> dict:
    cfg.validate()
    runner = {
        "al_vs_random": run_al_vs_random,
        "mtal_vs_single": run_mtal_vs_single,
        "demographic": run_demographic,
        "prompt_eval": run_prompt_eval,
    }[cfg.scenario]
    return runner(cfg)

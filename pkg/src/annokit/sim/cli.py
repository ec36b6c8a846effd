"""Experiment runner CLI: one subcommand per scenario."""

from __future__ import annotations

from pathlib import Path

import click

from .corpus import SeqCorpusParams
from .scenarios import SimConfig, run_scenario


def _common(budget=500, k=25, epochs=10, lr=2.0, dim=32):
    """Shared flags; per-scenario defaults carry the calibrated settings."""

    def wrap(f):
        decorators = [
            click.option("--seeds", default="0,1,2,3,4", show_default=True,
                         help="Comma-separated seeds."),
            click.option("--budget", default=budget, show_default=True, type=int),
            click.option("--k", "query_k", default=k, show_default=True, type=int,
                         help="Query batch size."),
            click.option("--alpha", "alphas", multiple=True, metavar="TASK=W",
                         help="Per-task loss weight (repeatable)."),
            click.option("--agg", default="mean", show_default=True,
                         type=click.Choice(["mean", "min"]),
                         help="Sequence confidence aggregation."),
            click.option("--epochs", default=epochs, show_default=True, type=int),
            click.option("--lr", default=lr, show_default=True, type=float),
            click.option("--dim", "feature_dim", default=dim, show_default=True,
                         type=int, help="Extractor feature dimension."),
            click.option("--noise", default=0.0, show_default=True, type=float,
                         help="Simulated annotator error rate."),
            click.option("--corpus", "corpus_path", default=None,
                         type=click.Path(exists=True),
                         help="CoNLL-format corpus (default: synthetic)."),
            click.option("--synthetic", is_flag=True, default=False,
                         help="Force the synthetic generator even with --corpus."),
            click.option("--pool-size", default=2000, show_default=True, type=int,
                         help="Synthetic pool size."),
            click.option("--out", "out_dir", default="sim-out", show_default=True,
                         type=click.Path()),
        ]
        for d in reversed(decorators):
            f = d(f)
        return f

    return wrap


def _build_config(scenario, seeds, budget, query_k, alphas, agg, epochs, lr,
                  feature_dim, noise, corpus_path, synthetic, pool_size, out_dir,
                  **extra) -> SimConfig:
    parsed_alphas = {}
    for item in alphas:
        task, _, weight = item.partition("=")
        parsed_alphas[task] = float(weight or 1.0)
    if synthetic:
        corpus_path = None
    return SimConfig(
        scenario=scenario,
        seeds=[int(s) for s in seeds.split(",") if s != ""],
        budget=budget,
        query_k=query_k,
        alphas=parsed_alphas,
        confidence_agg=agg,
        epochs=epochs,
        learning_rate=lr,
        feature_dim=feature_dim,
        noise_rate=noise,
        corpus_path=corpus_path,
        corpus_params=SeqCorpusParams(n_sentences=pool_size),
        out_dir=Path(out_dir),
        **extra,
    )


@click.group()
def main():
    """Simulation harness for the suggestion back-ends."""


@main.command("al-vs-random")
@_common()
def al_vs_random(**kwargs):
    """Least-confidence querying vs a random baseline."""
    summary = run_scenario(_build_config("al_vs_random", **kwargs))
    click.echo(f"least-confidence wins {summary['wins_lc']}/{len(summary['seeds'])} seeds")


@main.command("mtal-vs-single")
@_common(budget=400, k=50, epochs=20, lr=1.0, dim=64)
def mtal_vs_single(**kwargs):
    """Joint multi-task training vs separate single-task models."""
    summary = run_scenario(_build_config("mtal_vs_single", **kwargs))
    click.echo(f"mean extractor pass ratio: {summary['mean_pass_ratio']:.3f}")
    for task in ("chunk", "entity"):
        click.echo(
            f"{task}: joint F1 {summary[f'mean_f1_joint_{task}']:.3f} "
            f"vs single {summary[f'mean_f1_single_{task}']:.3f}"
        )


@main.command("demographic")
@_common()
def demographic(**kwargs):
    """Statement-only vs age-augmented suggestion accuracy."""
    summary = run_scenario(_build_config("demographic", **kwargs))
    click.echo(
        "accuracy: random {mean_accuracy_random:.3f} | statement-only "
        "{mean_accuracy_statement_only:.3f} | with-age {mean_accuracy_with_age:.3f} "
        "(text-only bayes bound {mean_bayes_statement_only:.3f})".format(**summary)
    )


@main.command("prompt-eval")
@_common()
@click.option("--strategy", default="random", show_default=True,
              type=click.Choice(["random", "similar"]))
@click.option("--n-examples", default=5, show_default=True, type=int)
@click.option("--mock-llm", default="gold", show_default=True,
              type=click.Choice(["gold", "all-o"]))
@click.option("--n-eval", default=120, show_default=True, type=int)
def prompt_eval(**kwargs):
    """Few-shot prompting against a mock (or gold-echo) completion API."""
    summary = run_scenario(_build_config("prompt_eval", **kwargs))
    click.echo(
        f"entity F1 {summary['mean_f1']:.3f}, token accuracy "
        f"{summary['mean_accuracy']:.3f}"
    )


if __name__ == "__main__":
    main()

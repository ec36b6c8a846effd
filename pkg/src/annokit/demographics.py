"""Annotator-demographic augmentation: prepend profile pseudo-tokens.

Features render as "name=value" pseudo-tokens placed ahead of the word
tokens, so the same sentence can receive different suggestions for different
annotators. Continuous features are bucketed (decade bins by default)
because the native extractor hashes discrete symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .engine.model import CLASSIFICATION, Instance, MultiTaskModel
from .engine.model import suggest as model_suggest


class DemographicsError(Exception):
    pass


class MissingFeature(DemographicsError):
    pass


def decade_bucket(value: float) -> str:
    return f"{int(value // 10) * 10}s"


@dataclass(frozen=True)
class FeatureDeclaration:
    """Per-task declaration: which features, in which order, how bucketed."""

    names: tuple[str, ...]
    buckets: dict[str, str] = field(default_factory=dict)  # name -> "decade" | "none"

    def render(self, name: str, value: Any) -> str:
        if self.buckets.get(name, "decade" if isinstance(value, (int, float)) else "none") \
                == "decade" and isinstance(value, (int, float)) and not isinstance(value, bool):
            return f"{name}={decade_bucket(float(value))}"
        return f"{name}={value}"


@dataclass(frozen=True)
class DemographicProfile:
    """Ordered feature values for one annotator."""

    features: tuple[tuple[str, Any], ...]

    @classmethod
    def from_dict(cls, values: dict[str, Any], order: Sequence[str] | None = None):
        names = list(order) if order is not None else list(values)
        return cls(tuple((n, values[n]) for n in names if n in values))


@dataclass(frozen=True)
class AugmentedInstance:
    base: Instance
    demo_tokens: tuple[str, ...]

    @property
    def combined(self) -> tuple[str, ...]:
        return self.demo_tokens + self.base.tokens


def encode_demographics(
    profile: DemographicProfile, declaration: FeatureDeclaration
) -> list[str]:
    """One pseudo-token per declared feature, in declaration order."""
    values = dict(profile.features)
    tokens = []
    for name in declaration.names:
        if name not in values:
            raise MissingFeature(f"profile lacks declared feature {name!r}")
        tokens.append(declaration.render(name, values[name]))
    return tokens


def augment(
    inst: Instance, profile: DemographicProfile, declaration: FeatureDeclaration
) -> Instance:
    """Instance over demo-then-word tokens; sequence gold stays on word positions."""
    demo = tuple(encode_demographics(profile, declaration))
    if not demo:
        return inst
    labels: dict[str, Any] = {}
    for task_id, value in inst.labels.items():
        if isinstance(value, (list, tuple)):
            labels[task_id] = (None,) * len(demo) + tuple(value)
        else:
            labels[task_id] = value
    return Instance(inst.instance_id, demo + inst.tokens, labels)


def suggest_for_annotator(
    model: MultiTaskModel,
    inst: Instance,
    profile: DemographicProfile,
    declaration: FeatureDeclaration,
    agg: str = "mean",
) -> dict[str, tuple]:
    """Suggestions conditioned on the annotator's profile.

    Sequence predictions are trimmed back to word-token positions so they
    align with the original instance.
    """
    demo = tuple(encode_demographics(profile, declaration))
    augmented = augment(inst, profile, declaration)
    out = {}
    for task_id, (labels, conf) in model_suggest(model, augmented, agg=agg).items():
        if model.heads[task_id].kind != CLASSIFICATION and demo:
            labels = labels[len(demo):]
        out[task_id] = (labels, conf)
    return out

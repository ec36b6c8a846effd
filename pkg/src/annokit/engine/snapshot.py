"""Versioned model snapshots (npz: weight arrays + a JSON metadata blob)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .features import HashedFeatureExtractor
from .model import MultiTaskModel, TaskHead

FORMAT_VERSION = 1


def save_snapshot(model: MultiTaskModel, path: str | Path) -> None:
    if not isinstance(model.extractor, HashedFeatureExtractor):
        raise ValueError("only native-extractor models are snapshot-serializable")
    meta = {
        "version": FORMAT_VERSION,
        "feature_dim": model.extractor.feature_dim,
        "n_buckets": model.extractor.n_buckets,
        "hash_seed": model.extractor.hash_seed,
        "trained": model.trained,
        "heads": {
            t: {"label_set": list(h.label_set), "kind": h.kind}
            for t, h in model.heads.items()
        },
    }
    arrays = {
        "meta": np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8),
        "ext_embeddings": model.extractor.embeddings,
        "ext_bias": model.extractor.bias,
    }
    for t, h in model.heads.items():
        arrays[f"head_{t}_weights"] = h.weights
        arrays[f"head_{t}_bias"] = h.bias
    with open(path, "wb") as f:
        np.savez(f, **arrays)


def load_snapshot(path: str | Path) -> MultiTaskModel:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode("utf-8"))
        if meta["version"] != FORMAT_VERSION:
            raise ValueError(f"unsupported snapshot version {meta['version']}")
        extractor = HashedFeatureExtractor(
            feature_dim=meta["feature_dim"],
            n_buckets=meta["n_buckets"],
            hash_seed=meta["hash_seed"],
        )
        extractor.embeddings = data["ext_embeddings"].copy()
        extractor.bias = data["ext_bias"].copy()
        heads = {}
        for t, info in meta["heads"].items():
            heads[t] = TaskHead(
                task_id=t,
                label_set=tuple(info["label_set"]),
                kind=info["kind"],
                weights=data[f"head_{t}_weights"].copy(),
                bias=data[f"head_{t}_bias"].copy(),
            )
    model = MultiTaskModel(extractor, heads)
    model.trained = meta["trained"]
    return model

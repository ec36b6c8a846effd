"""Token feature extractors feeding the per-task heads.

The native extractor hashes window features (token identity, lowercase,
prefixes/suffixes up to 3 bytes, neighbors at +-1/+-2) and projects them
through a trainable embedding table with a tanh nonlinearity. An external
encoder can stand in behind the same interface; its vectors are fixed.
"""

from __future__ import annotations

import numpy as np

from . import kernels


class HashedFeatureExtractor:
    """Trainable hashed-window extractor: x_t = tanh(mean(E[feats(t)]) + b)."""

    trainable = True

    def __init__(
        self,
        feature_dim: int = 32,
        n_buckets: int = 2**15,
        hash_seed: int = 0,
        init_seed: int = 0,
        init_scale: float = 1.0,
    ):
        self.feature_dim = feature_dim
        self.n_buckets = n_buckets
        self.hash_seed = hash_seed
        rng = np.random.default_rng(init_seed)
        self.embeddings = rng.normal(0.0, init_scale, size=(n_buckets, feature_dim))
        self.bias = np.zeros(feature_dim)
        self._bucket_cache: dict[tuple[str, ...], tuple[np.ndarray, np.ndarray]] = {}

    def clone(self) -> "HashedFeatureExtractor":
        out = HashedFeatureExtractor.__new__(HashedFeatureExtractor)
        out.feature_dim = self.feature_dim
        out.n_buckets = self.n_buckets
        out.hash_seed = self.hash_seed
        out.embeddings = self.embeddings.copy()
        out.bias = self.bias.copy()
        out._bucket_cache = self._bucket_cache  # hash outputs are parameter-free
        return out

    def buckets(self, tokens: tuple[str, ...]) -> tuple[np.ndarray, np.ndarray]:
        key = tuple(tokens)
        cached = self._bucket_cache.get(key)
        if cached is None:
            cached = kernels.token_feature_buckets(list(tokens), self.n_buckets, self.hash_seed)
            self._bucket_cache[key] = cached
        return cached

    def forward(self, tokens: tuple[str, ...]) -> tuple[np.ndarray, dict]:
        """Per-token feature matrix (T, D) plus the cache backward needs."""
        idx, offsets = self.buckets(tokens)
        pre = kernels.gather_mean(self.embeddings, idx, offsets) + self.bias
        x = np.tanh(pre)
        return x, {"idx": idx, "offsets": offsets, "x": x}

    def backward(self, cache: dict, dx: np.ndarray, grads: dict[str, np.ndarray]) -> None:
        """Accumulate dL/dE and dL/db given dL/dx."""
        dpre = dx * (1.0 - cache["x"] ** 2)
        grads["ext.bias"] += dpre.sum(axis=0)
        kernels.scatter_add_mean(dpre, cache["idx"], cache["offsets"], grads["ext.embeddings"])

    def params(self) -> dict[str, np.ndarray]:
        return {"ext.embeddings": self.embeddings, "ext.bias": self.bias}


class ExternalEncoderExtractor:
    """Fixed feature source backed by an encoder service client."""

    trainable = False

    def __init__(self, client, feature_dim: int):
        self.client = client
        self.feature_dim = feature_dim
        self._cache: dict[tuple[str, ...], np.ndarray] = {}

    def clone(self) -> "ExternalEncoderExtractor":
        return self

    def forward(self, tokens: tuple[str, ...]) -> tuple[np.ndarray, dict]:
        key = tuple(tokens)
        x = self._cache.get(key)
        if x is None:
            vectors = self.client.encode(list(tokens))
            x = np.asarray(vectors, dtype=np.float64)
            if x.shape != (len(tokens), self.feature_dim):
                raise ValueError(
                    f"encoder returned shape {x.shape}, expected "
                    f"({len(tokens)}, {self.feature_dim})"
                )
            self._cache[key] = x
        return x, {}

    def backward(self, cache: dict, dx: np.ndarray, grads: dict[str, np.ndarray]) -> None:
        pass

    def params(self) -> dict[str, np.ndarray]:
        return {}

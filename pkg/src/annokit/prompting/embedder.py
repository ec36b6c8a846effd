"""Sentence embedding contract plus the offline hashed bag-of-words fallback."""

from __future__ import annotations

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a(data: bytes, h: int = _FNV_OFFSET) -> int:
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


class HashedBowEmbedder:
    """L2-normalized hashed bag-of-words; deterministic per sentence."""

    def __init__(self, dim: int = 256, seed: int = 0):
        self.dim = dim
        self._state = _fnv1a(seed.to_bytes(8, "little"))

    def embed(self, sentence: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        for token in sentence.split():
            vec[_fnv1a(token.encode("utf-8"), self._state) % self.dim] += 1.0
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


class EncoderEmbedder:
    """Mean-pooled vectors from an external encoder service."""

    def __init__(self, client, dim: int):
        self.client = client
        self.dim = dim

    def embed(self, sentence: str) -> np.ndarray:
        tokens = sentence.split() or [""]
        vectors = np.asarray(self.client.encode(tokens), dtype=np.float64)
        pooled = vectors.mean(axis=0)
        norm = np.linalg.norm(pooled)
        return pooled / norm if norm > 0 else pooled

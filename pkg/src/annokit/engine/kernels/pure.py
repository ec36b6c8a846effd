"""Pure-Python/numpy kernels: token feature hashing and sparse embedding ops.

Reference implementation; `_native` (Cython) must produce identical bucket
indices and numerically equivalent gather/scatter results.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

_BOS = b"<s>"
_EOS = b"</s>"

# template ids: 0 identity, 1 lowercase, 2-4 byte prefixes, 5-7 byte suffixes,
# 8/9 neighbors at -1/+1, 10/11 neighbors at -2/+2
_PREFIX_LENS = (1, 2, 3)
_SUFFIX_LENS = (1, 2, 3)


def _fnv1a(data: bytes, h: int) -> int:
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def _seed_state(seed: int, template: int) -> int:
    h = _fnv1a((seed & _MASK64).to_bytes(8, "little"), _FNV_OFFSET)
    return _fnv1a(bytes([template]), h)


def _bucket(data: bytes, state: int, n_buckets: int) -> int:
    return _fnv1a(data, state) % n_buckets


def token_feature_buckets(
    tokens: list[str], n_buckets: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Hash window features for each token.

    Returns (idx, offsets): idx[offsets[t]:offsets[t+1]] are the feature
    buckets of token t, in template order.
    """
    states = [_seed_state(seed, t) for t in range(12)]
    encoded = [tok.encode("utf-8") for tok in tokens]
    n = len(encoded)
    idx: list[int] = []
    offsets = np.empty(n + 1, dtype=np.int64)
    offsets[0] = 0
    for t in range(n):
        raw = encoded[t]
        idx.append(_bucket(raw, states[0], n_buckets))
        idx.append(_bucket(tokens[t].lower().encode("utf-8"), states[1], n_buckets))
        for j, plen in enumerate(_PREFIX_LENS):
            if len(raw) >= plen:
                idx.append(_bucket(raw[:plen], states[2 + j], n_buckets))
        for j, slen in enumerate(_SUFFIX_LENS):
            if len(raw) >= slen:
                idx.append(_bucket(raw[-slen:], states[5 + j], n_buckets))
        idx.append(_bucket(encoded[t - 1] if t >= 1 else _BOS, states[8], n_buckets))
        idx.append(_bucket(encoded[t + 1] if t + 1 < n else _EOS, states[9], n_buckets))
        idx.append(_bucket(encoded[t - 2] if t >= 2 else _BOS, states[10], n_buckets))
        idx.append(_bucket(encoded[t + 2] if t + 2 < n else _EOS, states[11], n_buckets))
        offsets[t + 1] = len(idx)
    return np.asarray(idx, dtype=np.int64), offsets


def gather_mean(table: np.ndarray, idx: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Per-segment mean of table rows: out[t] = mean(table[idx[o_t:o_{t+1}]])."""
    counts = np.diff(offsets).astype(np.float64)
    rows = table[idx]
    sums = np.add.reduceat(rows, offsets[:-1], axis=0)
    return sums / counts[:, None]


def scatter_add_mean(
    grad: np.ndarray, idx: np.ndarray, offsets: np.ndarray, out: np.ndarray
) -> None:
    """Backward of gather_mean: out[idx rows of segment t] += grad[t] / count_t."""
    counts = np.diff(offsets)
    scaled = grad / counts.astype(np.float64)[:, None]
    np.add.at(out, idx, np.repeat(scaled, counts, axis=0))

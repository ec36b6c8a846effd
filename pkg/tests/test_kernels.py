import numpy as np
import pytest

from annokit.engine import kernels
from annokit.engine.kernels import pure


def _random_tokens(rng, n):
    alphabet = "abcdefgh漢字XYZ.,-123"
    return [
        "".join(rng.choice(list(alphabet), size=rng.integers(1, 9)))
        for _ in range(n)
    ]


def test_backend_reports_name():
    assert kernels.BACKEND in ("native", "pure")


def test_hashing_deterministic():
    idx1, off1 = kernels.token_feature_buckets(["same", "context"], 512, 42)
    idx2, off2 = kernels.token_feature_buckets(["same", "context"], 512, 42)
    assert np.array_equal(idx1, idx2)
    assert np.array_equal(off1, off2)


def test_hashing_seed_sensitivity():
    idx1, _ = kernels.token_feature_buckets(["same", "context"], 4096, 1)
    idx2, _ = kernels.token_feature_buckets(["same", "context"], 4096, 2)
    assert not np.array_equal(idx1, idx2)


def test_feature_counts_per_token():
    # 1-byte token: identity + lower + 1 prefix + 1 suffix + 4 neighbors = 8
    idx, off = kernels.token_feature_buckets(["a"], 512, 0)
    assert off[1] - off[0] == 8
    # >=3-byte token gets all prefixes and suffixes = 12
    idx, off = kernels.token_feature_buckets(["abcd"], 512, 0)
    assert off[1] - off[0] == 12


@pytest.mark.parametrize("n_tokens", [1, 3, 17])
def test_native_matches_pure(n_tokens):
    rng = np.random.default_rng(n_tokens)
    tokens = _random_tokens(rng, n_tokens)
    idx_n, off_n = kernels.token_feature_buckets(tokens, 2048, 9)
    idx_p, off_p = pure.token_feature_buckets(tokens, 2048, 9)
    assert np.array_equal(idx_n, idx_p)
    assert np.array_equal(off_n, off_p)

    table = rng.normal(size=(2048, 8))
    g_n = kernels.gather_mean(table, idx_n, off_n)
    g_p = pure.gather_mean(table, idx_p, off_p)
    np.testing.assert_allclose(g_n, g_p, rtol=1e-12, atol=0)

    grad = rng.normal(size=(n_tokens, 8))
    out_n = np.zeros_like(table)
    out_p = np.zeros_like(table)
    kernels.scatter_add_mean(grad, idx_n, off_n, out_n)
    pure.scatter_add_mean(grad, idx_p, off_p, out_p)
    np.testing.assert_allclose(out_n, out_p, rtol=1e-12, atol=1e-15)


def test_gather_mean_against_loop():
    rng = np.random.default_rng(0)
    tokens = _random_tokens(rng, 5)
    idx, off = kernels.token_feature_buckets(tokens, 256, 3)
    table = rng.normal(size=(256, 4))
    got = kernels.gather_mean(table, idx, off)
    for t in range(5):
        rows = idx[off[t]:off[t + 1]]
        np.testing.assert_allclose(got[t], table[rows].mean(axis=0), rtol=1e-12)


def test_scatter_is_adjoint_of_gather():
    # <gather(E), G> == <E, scatter(G)> for the mean-pooled linear map
    rng = np.random.default_rng(1)
    tokens = _random_tokens(rng, 6)
    idx, off = kernels.token_feature_buckets(tokens, 128, 0)
    table = rng.normal(size=(128, 5))
    grad = rng.normal(size=(6, 5))
    lhs = float((kernels.gather_mean(table, idx, off) * grad).sum())
    scattered = np.zeros_like(table)
    kernels.scatter_add_mean(grad, idx, off, scattered)
    rhs = float((table * scattered).sum())
    assert abs(lhs - rhs) < 1e-9

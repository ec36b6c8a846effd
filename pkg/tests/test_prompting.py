import itertools
import json

import httpx
import numpy as np
import pytest

from annokit.prompting import (
    ApiConfig,
    ApiError,
    CompletionClient,
    ContextLengthExceeded,
    DimMismatch,
    EmptyExamples,
    FewShotExample,
    HashedBowEmbedder,
    PoolTooSmall,
    ZeroVector,
    build_prompt,
    cosine,
    parse_tags,
    select_random,
    select_similar,
    target_sentence_of,
)


@pytest.fixture(scope="module")
def ner_fixture(request):
    root = request.config.rootpath / "fixtures" / "prompts"
    data = json.loads((root / "ner_exemplars.json").read_text(encoding="utf-8"))
    expected = (root / "ner_prompt_expected.txt").read_text(encoding="utf-8")
    return data, expected


# ------------------------------------------------------------- build_prompt

def test_prompt_reproduces_shipped_rendering_byte_for_byte(ner_fixture):
    data, expected = ner_fixture
    examples = [FewShotExample(e["sentence"], e["answer"]) for e in data["examples"]]
    prompt = build_prompt(examples, data["target"], data["task_name"])
    assert prompt == expected


def test_single_example_prompt_shape():
    prompt = build_prompt([FewShotExample("hi", "O")], "yo", "tags")
    assert prompt.count("\n\n") == 1
    head, tail = prompt.split("\n\n")
    assert head == "Given the sentence `` hi '' the tags are `` O ''"
    assert tail == "Given the sentence `` yo '' the tags are"


def test_target_clause_has_no_answer():
    prompt = build_prompt([FewShotExample("a", "O")], "b", "tags")
    assert prompt.endswith("are")


def test_empty_examples_rejected():
    with pytest.raises(EmptyExamples):
        build_prompt([], "x", "tags")


def test_prompt_injective_on_inputs():
    ex1 = [FewShotExample("a b", "O O")]
    ex2 = [FewShotExample("a", "O")]
    assert build_prompt(ex1, "t", "tags") != build_prompt(ex2, "t", "tags")
    assert build_prompt(ex1, "t", "tags") != build_prompt(ex1, "u", "tags")


def test_target_sentence_recoverable(ner_fixture):
    data, _ = ner_fixture
    examples = [FewShotExample(e["sentence"], e["answer"]) for e in data["examples"]]
    prompt = build_prompt(examples, data["target"], data["task_name"])
    assert target_sentence_of(prompt) == data["target"]


# ------------------------------------------------------------ select_random

def _pool(n):
    return [FewShotExample(f"sentence {i} body", "O O O") for i in range(n)]


def test_random_full_pool_is_permutation():
    pool = _pool(7)
    got = select_random(pool, 7, seed=3)
    assert sorted(e.sentence for e in got) == sorted(e.sentence for e in pool)


def test_random_deterministic_per_seed():
    pool = _pool(30)
    assert select_random(pool, 5, seed=9) == select_random(pool, 5, seed=9)


def test_random_seeds_differ_statistically():
    # collision probability for ordered 5-of-100 draws is ~1e-10 per pair
    pool = _pool(100)
    draws = {tuple(e.sentence for e in select_random(pool, 5, seed=s)) for s in range(50)}
    assert len(draws) == 50


def test_random_pool_too_small():
    with pytest.raises(PoolTooSmall):
        select_random(_pool(3), 4, seed=0)


def test_random_token_cap_skips_long_sentences():
    pool = _pool(5) + [FewShotExample("x " * 50, "O " * 50)]
    got = select_random(pool, 5, seed=1, max_sentence_tokens=10)
    assert all(len(e.sentence.split()) <= 10 for e in got)


# ------------------------------------------------------------------ cosine

def test_cosine_identity_and_orthogonal():
    assert cosine([1.0, 2.0], [1.0, 2.0]) == pytest.approx(1.0)
    assert cosine([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)
    assert cosine([1.0, 2.0], [2.0, 4.0]) == pytest.approx(1.0)


def test_cosine_errors():
    with pytest.raises(ZeroVector):
        cosine([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(DimMismatch):
        cosine([1.0], [1.0, 0.0])


# ----------------------------------------------------------- select_similar

def test_identical_sentence_ranks_first():
    pool = _pool(9) + [FewShotExample("exact match here", "O O O")]
    embedder = HashedBowEmbedder(dim=64, seed=0)
    got = select_similar(pool, "exact match here", 3, embedder)
    assert got[0].sentence == "exact match here"
    assert cosine(embedder.embed(got[0].sentence), embedder.embed("exact match here")) == 1.0


def test_similar_matches_full_sort_oracle():
    rng = np.random.default_rng(17)
    vocab = [f"w{i}" for i in range(12)]
    embedder = HashedBowEmbedder(dim=64, seed=1)
    for trial in range(30):
        pool = [
            FewShotExample(" ".join(rng.choice(vocab, size=rng.integers(1, 6))), "O")
            for _ in range(10)
        ]
        target = " ".join(rng.choice(vocab, size=4))
        n = int(rng.integers(1, 11))
        got = select_similar(pool, target, n, embedder)

        tv = embedder.embed(target)
        def sim(ex):
            try:
                return cosine(embedder.embed(ex.sentence), tv)
            except ZeroVector:
                return float("-inf")
        oracle = sorted(
            range(10), key=lambda i: (-sim(pool[i]), i)
        )[:n]
        assert got == [pool[i] for i in oracle], f"trial {trial}"


def test_similar_with_n_equal_pool_sorts_descending():
    pool = [
        FewShotExample("alpha beta", "O O"),
        FewShotExample("alpha beta gamma", "O O O"),
        FewShotExample("unrelated words here", "O O O"),
    ]
    embedder = HashedBowEmbedder(dim=64, seed=0)
    got = select_similar(pool, "alpha beta", 3, embedder)
    tv = embedder.embed("alpha beta")
    sims = [cosine(embedder.embed(e.sentence), tv) for e in got]
    assert sims == sorted(sims, reverse=True)


def test_similar_requires_embedder():
    from annokit.prompting import EmbedderUnavailable

    with pytest.raises(EmbedderUnavailable):
        select_similar(_pool(3), "x", 1, None)


# --------------------------------------------------------------- query_llm

def _client(handler, **api_kwargs):
    api = ApiConfig(endpoint="http://llm.test/v1/completions", model="stub", **api_kwargs)
    sleeps = []
    client = CompletionClient(api, transport=httpx.MockTransport(handler),
                              sleep=sleeps.append)
    return client, sleeps


def test_query_round_trip_verbatim():
    def handler(request):
        body = json.loads(request.content)
        assert body["model"] == "stub"
        return httpx.Response(200, json={"choices": [{"text": " `` B-ORG O '' "}]})

    client, _ = _client(handler)
    assert client.query("prompt text") == " `` B-ORG O '' "


def test_context_limit_enforced_before_any_call():
    calls = []

    def handler(request):
        calls.append(request)
        return httpx.Response(200, json={"text": "x"})

    client, _ = _client(handler, context_char_limit=10)
    with pytest.raises(ContextLengthExceeded):
        client.query("x" * 11)
    assert calls == []


def test_retry_on_429_then_success():
    statuses = itertools.chain([429], itertools.repeat(200))

    def handler(request):
        status = next(statuses)
        if status != 200:
            return httpx.Response(status, text="slow down")
        return httpx.Response(200, json={"choices": [{"text": "ok"}]})

    client, sleeps = _client(handler)
    assert client.query("p") == "ok"
    assert client.last_retries == 1
    assert len(sleeps) == 1


def test_non_retryable_error_raises_immediately():
    def handler(request):
        return httpx.Response(400, text="bad request")

    client, sleeps = _client(handler)
    with pytest.raises(ApiError) as exc:
        client.query("p")
    assert exc.value.status == 400
    assert sleeps == []


def test_retries_bounded():
    def handler(request):
        return httpx.Response(503, text="down")

    client, sleeps = _client(handler, max_attempts=3)
    with pytest.raises(ApiError) as exc:
        client.query("p")
    assert exc.value.status == 503
    assert len(sleeps) == 2


def test_audit_log_written(tmp_path):
    def handler(request):
        return httpx.Response(200, json={"choices": [{"text": "done"}]})

    api = ApiConfig(endpoint="http://llm.test/c", model="stub")
    client = CompletionClient(
        api, transport=httpx.MockTransport(handler),
        audit_path=str(tmp_path / "audit.ndjson"), sleep=lambda s: None,
    )
    client.query("hello")
    client.query("world")
    lines = (tmp_path / "audit.ndjson").read_text().splitlines()
    assert len(lines) == 2
    first = json.loads(lines[0])
    assert first["prompt"] == "hello"
    assert first["completion"] == "done"


# --------------------------------------------------------------- parse_tags

def test_parse_quoted_run():
    tags, mismatch = parse_tags("`` B-ORG I-ORG O ''", 3)
    assert tags == ["B-ORG", "I-ORG", "O"]
    assert not mismatch


def test_parse_pads_with_O():
    tags, mismatch = parse_tags("O O", 4)
    assert tags == ["O", "O", "O", "O"]
    assert mismatch


def test_parse_truncates():
    tags, mismatch = parse_tags("A B C D E", 3)
    assert tags == ["A", "B", "C"]
    assert mismatch


def test_parse_prefers_first_quoted_run():
    tags, mismatch = parse_tags('noise "B-PER O" trailing junk', 2)
    assert tags == ["B-PER", "O"]
    assert not mismatch


def test_parse_unknown_tags_pass_through():
    tags, _ = parse_tags("FOO BAR", 2)
    assert tags == ["FOO", "BAR"]


def test_parse_empty_completion():
    tags, mismatch = parse_tags("", 3)
    assert tags == ["O", "O", "O"]
    assert mismatch


def test_parse_output_length_always_expected():
    rng = np.random.default_rng(2)
    parts = ["O", "B-X", "I-X", "``", "''", '"', "junk"]
    for _ in range(200):
        completion = " ".join(rng.choice(parts, size=rng.integers(0, 12)))
        n = int(rng.integers(1, 9))
        tags, _ = parse_tags(completion, n)
        assert len(tags) == n

from __future__ import annotations

import math
import random

import numpy as np
import pytest
import requests

from molly.errors import AuthFailure, BackendUnavailable, DimMismatch, DuplicateId, EmptyIndex, EmptyText
from molly.index import (
    HashEmbedder,
    RemoteEmbedder,
    VectorIndex,
    build_index,
    cosine,
    embed,
    hash_embed,
    load_index,
    normalize,
    save_index,
)


def brute_force_top_k(index: VectorIndex, query: np.ndarray, k: int):
    """Oracle: per-item dot products, full sort, same tie-break rule."""
    scored = [
        (float(np.dot(index.matrix[i], query)), index.keys[i]) for i in range(len(index))
    ]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return scored[:k]


def random_texts(n: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    vocab = ["列表", "字典", "函数", "变量", "异常", "文件", "循环", "class", "slice", "index"]
    return [
        "q%04d " % i + " ".join(rng.choice(vocab) for _ in range(rng.randint(3, 8)))
        for i in range(n)
    ]


def test_hash_embed_deterministic():
    a = hash_embed("什么是列表", 256)
    b = hash_embed("什么是列表", 256)
    assert np.array_equal(a, b)


def test_hash_embed_unit_norm():
    for text in ("x", "abc", "什么是列表推导式"):
        assert abs(np.linalg.norm(hash_embed(text, 64)) - 1.0) < 1e-6


def test_hash_embed_disjoint_ngrams_orthogonal():
    # collision-free at this dimensionality (verified fixture)
    assert cosine(hash_embed("abc", 64), hash_embed("xyz", 64)) == 0.0


def test_hash_embed_shared_ngrams_more_similar():
    similar = cosine(hash_embed("abcabc", 16), hash_embed("abc", 16))
    dissimilar = cosine(hash_embed("abcabc", 16), hash_embed("xyz", 16))
    assert similar > dissimilar


def test_hash_embed_rejects_small_dim():
    with pytest.raises(ValueError):
        hash_embed("abc", 4)


def test_embed_rejects_empty_text():
    with pytest.raises(EmptyText):
        embed("", HashEmbedder(64))
    with pytest.raises(EmptyText):
        embed("   ", HashEmbedder(64))


def test_embed_normalizes():
    vec = embed("列表切片", HashEmbedder(64))
    assert abs(np.linalg.norm(vec) - 1.0) < 1e-6


def test_cosine_identity_and_orthogonality():
    v = normalize(np.array([1.0, 2.0, 3.0]))
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0


def test_cosine_hand_computed_value():
    # dot = 8, norms = 3 * 3 -> 8/9
    assert cosine(np.array([1.0, 2.0, 2.0]), np.array([2.0, 1.0, 2.0])) == pytest.approx(8 / 9)


def test_cosine_symmetry_and_bounds():
    rng = np.random.default_rng(11)
    for _ in range(50):
        u = rng.normal(size=16)
        v = rng.normal(size=16)
        assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)
        assert -1 - 1e-9 <= cosine(u, v) <= 1 + 1e-9


def test_cosine_dim_mismatch():
    with pytest.raises(DimMismatch):
        cosine(np.ones(3), np.ones(4))


def test_top_k_larger_than_index():
    index = build_index([("a", "列表"), ("b", "字典")], HashEmbedder(64))
    results = index.top_k(hash_embed("列表", 64), k=5)
    assert len(results) == 2
    assert [r.rank for r in results] == [1, 2]


def test_top_k_tie_break_by_key():
    vec = normalize(np.ones(8))
    index = VectorIndex.from_items([("b", vec), ("a", vec), ("c", vec)])
    results = index.top_k(vec, k=3)
    assert [r.key for r in results] == ["a", "b", "c"]
    assert results[0].score == pytest.approx(results[1].score)


def test_top_k_empty_index():
    index = VectorIndex.from_items([])
    with pytest.raises(EmptyIndex):
        index.top_k(np.ones(8), k=1)


def test_top_k_rejects_bad_k(sample_index, sample_embedder):
    with pytest.raises(ValueError):
        sample_index.top_k(hash_embed("x", sample_index.dim), k=0)


def test_top_k_dim_mismatch(sample_index):
    with pytest.raises(DimMismatch):
        sample_index.top_k(np.ones(sample_index.dim + 1), k=1)


def test_duplicate_keys_rejected():
    vec = normalize(np.ones(8))
    with pytest.raises(DuplicateId):
        VectorIndex.from_items([("a", vec), ("a", vec)])


def test_top_k_matches_brute_force_at_scale():
    embedder = HashEmbedder(64)
    texts = random_texts(1000, seed=5)
    index = build_index(((f"k{i:04d}", t) for i, t in enumerate(texts)), embedder)
    queries = random_texts(100, seed=99)
    for qt in queries:
        query = embed(qt, embedder)
        got = index.top_k(query, k=3)
        expected = brute_force_top_k(index, query, 3)
        # ranking (set, order, tie-breaks) must match exactly; raw scores may
        # differ in the last ulp between matvec and per-row dot
        assert [r.key for r in got] == [key for _, key in expected]
        assert [r.rank for r in got] == [1, 2, 3]
        for result, (score, _) in zip(got, expected):
            assert result.score == pytest.approx(score, abs=1e-12)


def test_queries_do_not_mutate_index(sample_index, sample_embedder):
    before = sample_index.matrix.copy()
    query = embed("什么是列表", sample_embedder)
    first = sample_index.top_k(query, k=3)
    second = sample_index.top_k(query, k=3)
    assert first == second
    assert np.array_equal(before, sample_index.matrix)


def test_index_round_trip_through_vector_file(tmp_path, sample_index):
    path = tmp_path / "index.vec"
    save_index(sample_index, path)
    reloaded = load_index(path)
    assert reloaded.keys == sample_index.keys
    assert np.array_equal(reloaded.matrix, sample_index.matrix)


def test_vector_file_format_is_line_oriented(tmp_path):
    index = build_index([("a", "列表"), ("b", "字典")], HashEmbedder(8))
    path = tmp_path / "index.vec"
    save_index(index, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    parts = lines[0].split(" ")
    assert parts[0] == "a"
    assert len(parts) == 9
    float(parts[1])  # parses as a number


class _FakeResponse:
    def __init__(self, status_code, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload
        self.text = text

    def json(self):
        return self._payload


def test_remote_embedder_request_and_normalization(monkeypatch):
    captured = {}

    def fake_post(url, json=None, headers=None, timeout=None):
        captured["url"] = url
        captured["json"] = json
        return _FakeResponse(200, {"data": [{"embedding": [3.0, 4.0]}]})

    monkeypatch.setattr(requests, "post", fake_post)
    embedder = RemoteEmbedder("http://emb.example/v1", "embed-1", api_key="k")
    vec = embed("列表", embedder)
    assert captured["url"] == "http://emb.example/v1/embeddings"
    assert captured["json"] == {"model": "embed-1", "input": "列表"}
    assert vec == pytest.approx([0.6, 0.8])


def test_remote_embedder_auth_failure(monkeypatch):
    monkeypatch.setattr(requests, "post", lambda *a, **kw: _FakeResponse(403, text="no"))
    embedder = RemoteEmbedder("http://emb.example/v1", "m", sleeper=lambda s: None)
    with pytest.raises(AuthFailure):
        embedder.embed("x")


def test_remote_embedder_retries_then_unavailable(monkeypatch):
    calls = {"n": 0}

    def fake_post(*args, **kwargs):
        calls["n"] += 1
        raise requests.ConnectionError("down")

    monkeypatch.setattr(requests, "post", fake_post)
    embedder = RemoteEmbedder("http://emb.example/v1", "m", sleeper=lambda s: None)
    with pytest.raises(BackendUnavailable):
        embedder.embed("x")
    assert calls["n"] == 3


def test_remote_embedder_from_env_requires_config():
    with pytest.raises(BackendUnavailable):
        RemoteEmbedder.from_env(env={})
    embedder = RemoteEmbedder.from_env(
        env={"MOLLY_EMBED_BASE_URL": "http://e/v1", "MOLLY_EMBED_MODEL": "m"}
    )
    assert embedder.base_url == "http://e/v1"
    assert embedder.model == "m"

"""Text embedding, in-memory vector index, and cosine top-k retrieval.

Search is an exact exhaustive scan: the knowledge base is small enough
that nothing approximate is warranted, and exactness keeps the brute
force oracle tests meaningful. The default embedder is a deterministic
character-n-gram hasher, so the whole retrieval path runs offline.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Protocol

import numpy as np
import requests

from .errors import (
    AuthFailure,
    BackendUnavailable,
    DimMismatch,
    DuplicateId,
    EmptyIndex,
    EmptyText,
)

DEFAULT_K = 3
DEFAULT_HASH_DIM = 256

ENV_EMBED_BASE_URL = "MOLLY_EMBED_BASE_URL"
ENV_EMBED_MODEL = "MOLLY_EMBED_MODEL"
ENV_EMBED_API_KEY = "MOLLY_EMBED_API_KEY"


def normalize(values: Iterable[float]) -> np.ndarray:
    """Return the L2-normalized float64 vector."""
    vec = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return vec / norm


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; equals the dot product for unit vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimMismatch(u.shape[0], v.shape[0])
    return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))


def hash_embed(text: str, dim: int = DEFAULT_HASH_DIM) -> np.ndarray:
    """Deterministic offline embedding: character n-grams hashed into buckets.

    Uses n-gram sizes 1..3 and a keyed-nothing blake2b bucket hash, so the
    output depends only on (text, dim). No network, no process salt.
    """
    if dim < 8:
        raise ValueError("hash embedding dimensionality must be at least 8")
    if not text:
        raise EmptyText()
    counts = np.zeros(dim, dtype=np.float64)
    for size in (1, 2, 3):
        for i in range(len(text) - size + 1):
            gram = text[i : i + size]
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
            counts[int.from_bytes(digest, "big") % dim] += 1.0
    return normalize(counts)


class EmbeddingBackend(Protocol):
    def embed(self, text: str) -> np.ndarray: ...


@dataclass(frozen=True)
class HashEmbedder:
    dim: int = DEFAULT_HASH_DIM

    def embed(self, text: str) -> np.ndarray:
        return hash_embed(text, self.dim)


class RemoteEmbedder:
    """Client for an embeddings endpoint following the common JSON convention.

    POST {base_url}/embeddings with {"model": ..., "input": ...} and read
    data[0].embedding from the response.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 30.0,
        max_attempts: int = 3,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.max_attempts = max_attempts
        self._sleep = sleeper

    @classmethod
    def from_env(cls, env: dict | None = None) -> "RemoteEmbedder":
        env = env if env is not None else dict(os.environ)
        base_url = env.get(ENV_EMBED_BASE_URL)
        model = env.get(ENV_EMBED_MODEL)
        if not base_url or not model:
            raise BackendUnavailable(
                f"{ENV_EMBED_BASE_URL} and {ENV_EMBED_MODEL} must be set for remote embedding"
            )
        return cls(base_url, model, api_key=env.get(ENV_EMBED_API_KEY))

    def embed(self, text: str) -> np.ndarray:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {"model": self.model, "input": text}
        last_error = "no attempt made"
        for attempt in range(self.max_attempts):
            try:
                response = requests.post(
                    f"{self.base_url}/embeddings",
                    json=payload,
                    headers=headers,
                    timeout=self.timeout,
                )
            except requests.RequestException as exc:
                last_error = str(exc)
            else:
                if response.status_code in (401, 403):
                    raise AuthFailure(response.status_code, response.text[:200])
                if response.status_code >= 500:
                    last_error = f"server error {response.status_code}"
                elif response.status_code >= 400:
                    raise BackendUnavailable(
                        f"embedding request rejected ({response.status_code}): {response.text[:200]}"
                    )
                else:
                    body = response.json()
                    return normalize(body["data"][0]["embedding"])
            if attempt + 1 < self.max_attempts:
                self._sleep(0.5 * 2**attempt)
        raise BackendUnavailable(last_error)


def embed(text: str, backend: EmbeddingBackend) -> np.ndarray:
    """Embed non-empty text through the given backend, L2-normalized."""
    if not text or not text.strip():
        raise EmptyText()
    return normalize(backend.embed(text))


@dataclass(frozen=True)
class RetrievalResult:
    key: str
    score: float
    rank: int


class VectorIndex:
    """Immutable in-memory index over (key, unit vector) pairs."""

    def __init__(self, keys: tuple[str, ...], matrix: np.ndarray):
        self.keys = keys
        self.matrix = matrix
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.keys)

    @classmethod
    def from_items(cls, items: Iterable[tuple[str, np.ndarray]]) -> "VectorIndex":
        keys: list[str] = []
        rows: list[np.ndarray] = []
        seen: set[str] = set()
        dim: int | None = None
        for key, vector in items:
            if key in seen:
                raise DuplicateId(key, line=len(keys) + 1)
            seen.add(key)
            vec = normalize(vector)
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise DimMismatch(dim, vec.shape[0])
            keys.append(key)
            rows.append(vec)
        matrix = np.vstack(rows) if rows else np.zeros((0, 0), dtype=np.float64)
        return cls(tuple(keys), matrix)

    def top_k(self, query: np.ndarray, k: int = DEFAULT_K) -> list[RetrievalResult]:
        """The k highest-cosine items, score descending, ties by ascending key."""
        if k < 1:
            raise ValueError("k must be at least 1")
        if len(self) == 0:
            raise EmptyIndex()
        query = np.asarray(query, dtype=np.float64)
        if query.shape[0] != self.dim:
            raise DimMismatch(self.dim, query.shape[0])
        scores = self.matrix @ query
        order = sorted(range(len(self)), key=lambda i: (-scores[i], self.keys[i]))
        return [
            RetrievalResult(key=self.keys[i], score=float(scores[i]), rank=rank)
            for rank, i in enumerate(order[:k], start=1)
        ]


def build_index(
    items: Iterable[tuple[str, str]], embedder: EmbeddingBackend
) -> VectorIndex:
    """Embed (key, text) pairs and assemble the index."""
    return VectorIndex.from_items((key, embed(text, embedder)) for key, text in items)


def save_index(index: VectorIndex, path: str | Path) -> None:
    """One line per item: key followed by the vector components."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for key, row in zip(index.keys, index.matrix):
            handle.write(key + " " + " ".join(repr(float(x)) for x in row) + "\n")


def load_index(path: str | Path) -> VectorIndex:
    """Rows are stored normalized, so they are loaded verbatim: re-running
    the normalization would perturb components by an ulp and break exact
    round-trips."""
    keys: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim: int | None = None
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(" ")
            key = parts[0]
            if key in seen:
                raise DuplicateId(key, lineno)
            seen.add(key)
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise DimMismatch(dim, vec.shape[0])
            keys.append(key)
            rows.append(vec)
    matrix = np.vstack(rows) if rows else np.zeros((0, 0), dtype=np.float64)
    return VectorIndex(tuple(keys), matrix)

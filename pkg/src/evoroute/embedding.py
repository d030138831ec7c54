"""Text embedding providers and cosine similarity.

The built-in provider is a dependency-free token-hash embedder: lowercase,
split on non-alphanumerics, hash each token with a fixed 64-bit hash (blake2b)
into `dimension` buckets with a ±1 sign taken from the top hash bit, sum, then
L2-normalize. It is pure — no clock, locale, or iteration-order dependence —
so identical bytes embed to identical vectors on every platform. A text with
no tokens (or whose buckets cancel to zero) maps to the first unit basis
vector so cosine stays defined.

A remote HTTP provider is available for real encoders; see RemoteEmbedder for
the wire protocol.
"""

from __future__ import annotations

import hashlib
import math
import re
from typing import Protocol, Sequence

import httpx
import numpy as np

from .core import DEFAULT_EMBEDDING_DIM, EmbeddingVector
from .errors import DimensionMismatch, RemoteUnavailable

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Shared tokenization: lowercase, alphanumeric runs only."""
    return _TOKEN_RE.findall(text.lower())


class Embedder(Protocol):
    dimension: int

    def embed(self, text: str) -> EmbeddingVector: ...


class HashingEmbedder:
    """Deterministic feature-hashing embedder; stands in for a sentence encoder."""

    def __init__(self, dimension: int = DEFAULT_EMBEDDING_DIM) -> None:
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension

    def embed(self, text: str) -> EmbeddingVector:
        vec = np.zeros(self.dimension)
        for token in tokenize(text):
            h = int.from_bytes(
                hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big"
            )
            sign = 1.0 if (h >> 63) & 1 else -1.0
            vec[h % self.dimension] += sign
        norm = math.sqrt(float(vec @ vec))
        if norm == 0.0:
            vec[0] = 1.0
        else:
            vec /= norm
        return EmbeddingVector(tuple(float(v) for v in vec))


class RemoteEmbedder:
    """HTTP embedding client.

    Protocol: POST `endpoint` with body {"texts": [str, ...]}, response
    {"embeddings": [[float, ...], ...]}, UTF-8, one vector per input in order.
    The client is safe for concurrent calls and applies a bounded timeout.
    """

    def __init__(
        self,
        endpoint: str,
        dimension: int = DEFAULT_EMBEDDING_DIM,
        timeout: float = 10.0,
        client: httpx.Client | None = None,
    ) -> None:
        if not endpoint:
            raise ValueError("RemoteEmbedder requires a non-empty endpoint")
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.endpoint = endpoint
        self.dimension = dimension
        self._client = client if client is not None else httpx.Client(timeout=timeout)

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        try:
            resp = self._client.post(self.endpoint, json={"texts": list(texts)})
            resp.raise_for_status()
            payload = resp.json()
        except httpx.HTTPError as exc:
            raise RemoteUnavailable(f"embedding service call failed: {exc}") from exc
        embeddings = payload.get("embeddings") if isinstance(payload, dict) else None
        if not isinstance(embeddings, list) or len(embeddings) != len(texts):
            raise RemoteUnavailable("embedding service returned a malformed payload")
        out = []
        for row in embeddings:
            if len(row) != self.dimension:
                raise DimensionMismatch(
                    f"remote returned dimension {len(row)}, expected {self.dimension}"
                )
            out.append(EmbeddingVector(tuple(float(v) for v in row)))
        return out


def make_embedder(
    kind: str = "hash",
    dimension: int = DEFAULT_EMBEDDING_DIM,
    endpoint: str | None = None,
) -> Embedder:
    if kind in ("hash", "deterministic_hash"):
        return HashingEmbedder(dimension)
    if kind in ("remote", "remote_service"):
        if not endpoint:
            raise ValueError("remote embedder requires an endpoint")
        return RemoteEmbedder(endpoint, dimension)
    raise ValueError(f"unknown embedder kind {kind!r}")


def cosine_sim(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity in [-1, 1]. Zero vectors are treated as the canonical
    unit basis vector, matching the embedder's degenerate-input rule."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions differ: {a.dimension} vs {b.dimension}")
    va = np.asarray(a.values)
    vb = np.asarray(b.values)
    na = math.sqrt(float(va @ va))
    nb = math.sqrt(float(vb @ vb))
    if na == 0.0:
        va = np.zeros(a.dimension)
        va[0] = 1.0
        na = 1.0
    if nb == 0.0:
        vb = np.zeros(b.dimension)
        vb[0] = 1.0
        nb = 1.0
    sim = float(va @ vb) / (na * nb)
    if sim >= 1.0 - 1e-12:
        return 1.0
    if sim <= -1.0 + 1e-12:
        return -1.0
    return sim

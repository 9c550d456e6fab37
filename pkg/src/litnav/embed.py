"""Text embeddings: provider contract, deterministic hashing stub, cosine, kNN.

The stub provider exists so every downstream pipeline stage is reproducible
without a network: each token lands on a hash-selected coordinate with a
hash-selected sign, so identical texts give identical unit vectors and
token-disjoint texts are near-orthogonal in expectation. A remote model is
just another implementation of the same contract.
"""

from __future__ import annotations

import time
from typing import Optional, Protocol, Sequence, runtime_checkable

import httpx
import numpy as np

from .querylang import tokenize_text

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


class EmbedError(ValueError):
    pass


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash, the fixed token hash for the stub embedder."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64
    return h


@runtime_checkable
class EmbeddingProvider(Protocol):
    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]: ...

    def dimension(self) -> int: ...

    def name(self) -> str: ...


class HashingEmbedder:
    """Deterministic stub provider (default 64 dimensions).

    Each lowercase alphanumeric token hashes to a coordinate (hash mod D)
    and a sign (bit 63); token contributions of +/-1 accumulate and the sum
    is L2-normalized. Raises on text with no tokens.
    """

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        tokens = tokenize_text(text)
        if not tokens:
            raise EmbedError(f"text has no tokens: {text!r}")
        vec = np.zeros(self.dim, dtype=np.float64)
        for tok in tokens:
            h = fnv1a64(tok.encode("utf-8"))
            sign = -1.0 if (h >> 63) & 1 else 1.0
            vec[h % self.dim] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            # opposite-sign tokens cancelled exactly; fall back to the first
            # token's coordinate so the result is still a unit vector
            h = fnv1a64(tokens[0].encode("utf-8"))
            vec[h % self.dim] = -1.0 if (h >> 63) & 1 else 1.0
            norm = 1.0
        return vec / norm

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]

    def dimension(self) -> int:
        return self.dim

    def name(self) -> str:
        return f"stub-fnv1a-{self.dim}d"


def stub_embed(text: str, dim: int = 64) -> np.ndarray:
    """One-off stub embedding (see :class:`HashingEmbedder`)."""
    return HashingEmbedder(dim).embed(text)


class RemoteEmbedder:
    """HTTP adapter for an external embedding model.

    POSTs ``{"texts": [...]}`` and expects ``{"vectors": [[...]]}``. Requests
    are batched; failures retry with exponential backoff, capped at three
    attempts total.
    """

    def __init__(
        self,
        endpoint: str,
        dim: int,
        api_key: Optional[str] = None,
        batch_size: int = 64,
        max_attempts: int = 3,
        backoff_base: float = 0.5,
        sleeper=time.sleep,
    ):
        self.endpoint = endpoint
        self.dim = dim
        self.api_key = api_key
        self.batch_size = batch_size
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self._sleep = sleeper

    def _post(self, texts: list[str]) -> list[np.ndarray]:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            try:
                resp = httpx.post(
                    self.endpoint, json={"texts": texts}, headers=headers, timeout=30.0
                )
                resp.raise_for_status()
                vectors = resp.json()["vectors"]
                out = [np.asarray(v, dtype=np.float64) for v in vectors]
                if len(out) != len(texts) or any(v.shape != (self.dim,) for v in out):
                    raise EmbedError("provider returned wrong shape")
                return [v / np.linalg.norm(v) for v in out]
            except Exception as exc:  # noqa: BLE001 - retried, then surfaced
                last_error = exc
                if attempt + 1 < self.max_attempts:
                    self._sleep(self.backoff_base * (2**attempt))
        raise EmbedError(f"remote embedding failed after {self.max_attempts} attempts: {last_error}")

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for start in range(0, len(texts), self.batch_size):
            out.extend(self._post(list(texts[start : start + self.batch_size])))
        return out

    def dimension(self) -> int:
        return self.dim

    def name(self) -> str:
        return f"remote:{self.endpoint}"


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; raises on dimension mismatch or zero vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise EmbedError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise EmbedError("cosine of a zero vector is undefined")
    return float(np.dot(u, v) / (nu * nv))


def knn(
    pairs: Sequence[tuple[str, np.ndarray]], query: np.ndarray, k: int
) -> list[tuple[str, float]]:
    """Exact k nearest neighbors by descending cosine, ties uid-ascending.

    k past the matrix size returns everything; an empty matrix is an error.
    """
    if k < 1:
        raise EmbedError("k must be >= 1")
    if not pairs:
        raise EmbedError("knn over an empty matrix")
    scored = [(uid, cosine(vec, query)) for uid, vec in pairs]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]

"""Sentence embeddings behind a pluggable provider interface.

Two providers ship with the toolkit: a fully deterministic offline provider
built from content hashes (no model, no network, identical bytes on every
platform) and a client for the remote embedding service speaking the
normative `/v1/embed` protocol.  An optional content-addressed on-disk
cache wraps either one.
"""

from __future__ import annotations

import hashlib
import os
import re
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import httpx
import numpy as np

from .errors import DimensionMismatch, ProviderUnavailable


@dataclass(frozen=True)
class ProviderInfo:
    provider_id: str
    dimension: int


@dataclass(frozen=True)
class EmbeddingVector:
    """Unit-norm sentence embedding tagged with its provider."""

    values: np.ndarray
    provider_id: str

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("embedding contains non-finite values")


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity of two same-provider unit vectors."""
    if a.provider_id != b.provider_id:
        raise DimensionMismatch(f"providers differ: {a.provider_id!r} vs {b.provider_id!r}")
    if a.values.shape != b.values.shape:
        raise DimensionMismatch(f"dimensions differ: {a.values.shape} vs {b.values.shape}")
    return float(np.clip(np.dot(a.values, b.values), -1.0, 1.0))


class Provider:
    """Interface: map texts to unit-norm row vectors."""

    def info(self) -> ProviderInfo:
        raise NotImplementedError

    def embed_raw(self, texts: list[str]) -> np.ndarray:
        raise NotImplementedError


_TOKEN = re.compile(r"[a-z0-9]+")


def _hash_unit_floats(tag: bytes, n: int) -> np.ndarray:
    """Expand a hash into n doubles uniform in [-1, 1), bit-identical everywhere.

    Built from raw SHA-256 output with exact float arithmetic only, so the
    result does not depend on any RNG implementation or libm.
    """
    blocks = []
    needed = n * 8
    counter = 0
    while needed > 0:
        blocks.append(hashlib.sha256(tag + counter.to_bytes(4, "big")).digest())
        needed -= 32
        counter += 1
    buf = b"".join(blocks)[: n * 8]
    ints = np.frombuffer(buf, dtype="<u8")
    return (ints >> np.uint64(11)).astype(np.float64) * (2.0 ** -52) - 1.0


def _unit(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    return v / norm if norm > 0 else v


class OfflineProvider(Provider):
    """Deterministic hash-based embeddings, dimension 384.

    Each text is a normalized mix of its token vectors (dominant term) and
    a whole-text vector, so texts sharing more tokens land closer on
    average while distinct texts still get distinct directions.
    """

    DIMENSION = 384
    _TOKEN_WEIGHT = 0.75
    _TEXT_WEIGHT = 0.25

    def __init__(self):
        self._token_cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def info(self) -> ProviderInfo:
        return ProviderInfo(provider_id="offline-hash-384", dimension=self.DIMENSION)

    def _token_vector(self, token: str) -> np.ndarray:
        with self._lock:
            vec = self._token_cache.get(token)
        if vec is None:
            vec = _hash_unit_floats(b"tok\x00" + token.encode("utf-8"), self.DIMENSION)
            with self._lock:
                self._token_cache[token] = vec
        return vec

    def embed_raw(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.DIMENSION))
        for i, text in enumerate(texts):
            tokens = _TOKEN.findall(text.lower())
            text_vec = _unit(_hash_unit_floats(b"txt\x00" + text.encode("utf-8"), self.DIMENSION))
            if tokens:
                token_sum = np.zeros(self.DIMENSION)
                for token in tokens:
                    token_sum = token_sum + self._token_vector(token)
                mixed = self._TOKEN_WEIGHT * _unit(token_sum) + self._TEXT_WEIGHT * text_vec
            else:
                mixed = text_vec
            out[i] = _unit(mixed)
        return out


class RemoteProvider(Provider):
    """Client for the normative embedding service protocol.

    POST {endpoint}/v1/embed with {"texts": [...]}; the response carries
    the model name, dimension and unit-norm vectors.  Batches are capped
    at `batch_size` texts with at most `max_inflight` requests in flight.
    """

    def __init__(
        self,
        endpoint: str,
        batch_size: int = 64,
        max_inflight: int = 4,
        timeout: float = 30.0,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.batch_size = batch_size
        self.max_inflight = max_inflight
        self._client = httpx.Client(timeout=timeout)
        self._info: ProviderInfo | None = None

    def health(self) -> dict:
        try:
            resp = self._client.get(f"{self.endpoint}/health")
        except httpx.HTTPError as exc:
            raise ProviderUnavailable(f"health check failed: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(f"health returned {resp.status_code}")
        return resp.json()

    def info(self) -> ProviderInfo:
        if self._info is None:
            doc = self.health()
            self._info = ProviderInfo(provider_id=str(doc["model"]), dimension=int(doc["dim"]))
        return self._info

    def _post_batch(self, texts: list[str]) -> np.ndarray:
        try:
            resp = self._client.post(f"{self.endpoint}/v1/embed", json={"texts": texts})
        except httpx.HTTPError as exc:
            raise ProviderUnavailable(f"embed request failed: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(f"embed returned {resp.status_code}: {resp.text[:200]}")
        doc = resp.json()
        info = self.info()
        if int(doc["dim"]) != info.dimension:
            raise DimensionMismatch(f"service dim changed: {doc['dim']} != {info.dimension}")
        matrix = np.asarray(doc["embeddings"], dtype=np.float64)
        if matrix.shape != (len(texts), info.dimension):
            raise DimensionMismatch(f"bad embedding shape {matrix.shape} for {len(texts)} texts")
        norms = np.linalg.norm(matrix, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-3):
            warnings.warn(
                f"service vectors deviate from unit norm by up to {np.max(np.abs(norms - 1.0)):.2e}; renormalizing",
                stacklevel=3,
            )
        return matrix / norms[:, None]

    def embed_raw(self, texts: list[str]) -> np.ndarray:
        info = self.info()
        batches = [texts[i : i + self.batch_size] for i in range(0, len(texts), self.batch_size)]
        out = np.empty((len(texts), info.dimension))
        with ThreadPoolExecutor(max_workers=self.max_inflight) as pool:
            results = list(pool.map(self._post_batch, batches))
        row = 0
        for block in results:
            out[row : row + len(block)] = block
            row += len(block)
        return out

    def close(self):
        self._client.close()


class DiskCache:
    """Content-addressed append-only vector cache.

    One file per (provider, text) key; writes go through a temp file and an
    atomic rename, so concurrent readers never observe partial vectors.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(provider_id: str, text: str) -> str:
        return hashlib.sha256(provider_id.encode() + b"\x00" + text.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.npy"

    def get(self, provider_id: str, text: str) -> np.ndarray | None:
        path = self._path(self.key(provider_id, text))
        if not path.exists():
            return None
        try:
            return np.load(path)
        except (OSError, ValueError):
            return None

    def put(self, provider_id: str, text: str, vector: np.ndarray):
        path = self._path(self.key(provider_id, text))
        if path.exists():
            return
        tmp = path.with_name(path.name + f".tmp-{os.getpid()}-{threading.get_ident()}")
        with open(tmp, "wb") as fh:
            np.save(fh, vector)
        os.replace(tmp, path)


class Embedder:
    """Facade: batch embedding with optional caching, plus cosine."""

    def __init__(self, provider: Provider, cache: DiskCache | None = None):
        self.provider = provider
        self.cache = cache

    @property
    def provider_id(self) -> str:
        return self.provider.info().provider_id

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        if any(not isinstance(t, str) or not t for t in texts):
            raise ValueError("texts must be non-empty strings")
        info = self.provider.info()
        vectors: list[np.ndarray | None] = [None] * len(texts)
        misses: list[int] = []
        if self.cache is not None:
            for i, text in enumerate(texts):
                hit = self.cache.get(info.provider_id, text)
                if hit is not None and hit.shape == (info.dimension,):
                    vectors[i] = hit
                else:
                    misses.append(i)
        else:
            misses = list(range(len(texts)))

        if misses:
            fresh = self.provider.embed_raw([texts[i] for i in misses])
            if fresh.shape != (len(misses), info.dimension):
                raise DimensionMismatch(f"provider returned shape {fresh.shape}")
            for row, i in enumerate(misses):
                vectors[i] = fresh[row]
                if self.cache is not None:
                    self.cache.put(info.provider_id, texts[i], fresh[row])

        return [EmbeddingVector(values=v, provider_id=info.provider_id) for v in vectors]

    def embed_one(self, text: str) -> EmbeddingVector:
        return self.embed([text])[0]


class TextSimilarity:
    """Memoized text-to-text cosine similarity backed by an embedder."""

    def __init__(self, embedder: Embedder):
        self.embedder = embedder
        self._memo: dict[str, EmbeddingVector] = {}

    @property
    def provider_id(self) -> str:
        return self.embedder.provider_id

    def prewarm(self, texts: list[str]):
        todo = [t for t in dict.fromkeys(texts) if t not in self._memo]
        if todo:
            for text, vec in zip(todo, self.embedder.embed(todo)):
                self._memo[text] = vec

    def __call__(self, a: str, b: str) -> float:
        self.prewarm([a, b])
        return cosine(self._memo[a], self._memo[b])

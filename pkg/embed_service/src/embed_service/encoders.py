"""Encoder backends behind the service.

Two implementations: a neural encoder wrapping a sentence-transformers
checkpoint (the documented default is all-MiniLM-L6-v2, 384 dimensions)
and a dependency-free deterministic hash encoder for environments without
model weights.  Both return unit-norm float vectors and report which
inputs were truncated to the maximum sequence length.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"

_TOKEN = re.compile(r"\S+")


class EncodeResult:
    def __init__(self, vectors: np.ndarray, truncated: list[int]):
        self.vectors = vectors
        self.truncated = truncated


class Encoder:
    """Interface: name, dimension, and batch encoding."""

    name: str
    dimension: int
    max_tokens: int

    def encode(self, texts: list[str]) -> EncodeResult:
        raise NotImplementedError


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms


class HashEncoder(Encoder):
    """Deterministic stand-in encoder built from content hashes.

    Serves protocol tests and offline deployments: same text, same vector,
    on every platform, with no weights to download.
    """

    def __init__(self, dimension: int = 384, max_tokens: int = 256):
        self.name = f"hash-encoder-{dimension}"
        self.dimension = dimension
        self.max_tokens = max_tokens

    def _vector(self, text: str) -> np.ndarray:
        needed = self.dimension * 8
        blocks = []
        counter = 0
        while needed > 0:
            seed = hashlib.sha256(text.encode("utf-8") + counter.to_bytes(4, "big")).digest()
            blocks.append(seed)
            needed -= 32
            counter += 1
        buffer = b"".join(blocks)[: self.dimension * 8]
        ints = np.frombuffer(buffer, dtype="<u8")
        return (ints >> np.uint64(11)).astype(np.float64) * (2.0 ** -52) - 1.0

    def encode(self, texts: list[str]) -> EncodeResult:
        truncated = []
        rows = []
        for i, text in enumerate(texts):
            tokens = _TOKEN.findall(text)
            if len(tokens) > self.max_tokens:
                truncated.append(i)
                text = " ".join(tokens[: self.max_tokens])
            rows.append(self._vector(text))
        return EncodeResult(vectors=_unit_rows(np.stack(rows)), truncated=truncated)


class SentenceTransformerEncoder(Encoder):
    """Neural encoder over a sentence-transformers checkpoint."""

    def __init__(self, model_name: str = DEFAULT_MODEL):
        from sentence_transformers import SentenceTransformer

        self._model = SentenceTransformer(model_name)
        self.name = model_name
        self.dimension = int(self._model.get_sentence_embedding_dimension())
        self.max_tokens = int(getattr(self._model, "max_seq_length", 256))

    def encode(self, texts: list[str]) -> EncodeResult:
        truncated = [
            i for i, text in enumerate(texts)
            if len(self._model.tokenizer(text)["input_ids"]) > self.max_tokens
        ]
        matrix = self._model.encode(
            texts, convert_to_numpy=True, normalize_embeddings=True, show_progress_bar=False,
        ).astype(np.float64)
        return EncodeResult(vectors=_unit_rows(matrix), truncated=truncated)

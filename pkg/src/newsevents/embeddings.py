"""Word embedding table: plain-text load, lookup, mean vectors, cosine."""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping

import numpy as np


class EmbeddingError(Exception):
    pass


class EmbeddingTable:
    """Immutable word -> dense vector map with a fixed dimension.

    Unknown-word lookup raises ``KeyError`` rather than silently returning
    zeros; callers that tolerate out-of-vocabulary words must check
    membership or use :meth:`mean_vector`, which skips them.
    """

    def __init__(self, vectors: Mapping[str, np.ndarray]):
        if not vectors:
            raise EmbeddingError("embedding table must not be empty")
        dims = {len(v) for v in vectors.values()}
        if len(dims) != 1:
            raise EmbeddingError(f"inconsistent vector dimensions: {sorted(dims)}")
        self.dimension = dims.pop()
        self._vectors = {w: np.asarray(v, dtype=float) for w, v in vectors.items()}

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def __getitem__(self, word: str) -> np.ndarray:
        return self._vectors[word]

    def __len__(self) -> int:
        return len(self._vectors)

    def __iter__(self) -> Iterator[str]:
        return iter(self._vectors)

    def mean_vector(self, words: Iterable[str]) -> np.ndarray | None:
        """Arithmetic mean of the known words' vectors; None if all unknown."""
        known = [self._vectors[w] for w in words if w in self._vectors]
        if not known:
            return None
        return np.mean(known, axis=0)


def load_embeddings(lines: Iterable[str]) -> EmbeddingTable:
    """Load a ``word v1 ... vd`` space-separated table.

    The dimension is inferred from the first data line; later lines with a
    different component count are rejected. Repeated words keep the first
    occurrence.
    """
    vectors: dict[str, np.ndarray] = {}
    dimension = None
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) < 2:
            raise EmbeddingError(f"line {number}: expected 'word v1 ... vd'")
        word, components = parts[0], parts[1:]
        if dimension is None:
            dimension = len(components)
        elif len(components) != dimension:
            raise EmbeddingError(
                f"line {number}: expected {dimension} components, got {len(components)}"
            )
        if word not in vectors:
            try:
                vectors[word] = np.array([float(c) for c in components])
            except ValueError as exc:
                raise EmbeddingError(f"line {number}: non-numeric component") from exc
    if not vectors:
        raise EmbeddingError("embedding input contained no vectors")
    return EmbeddingTable(vectors)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; zero-norm inputs yield 0."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def cosine_sparse(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Cosine over sparse key->weight vectors; empty sides yield 0."""
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(w * b[k] for k, w in a.items() if k in b)
    na = sum(w * w for w in a.values()) ** 0.5
    nb = sum(w * w for w in b.values()) ** 0.5
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)

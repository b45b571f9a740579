"""Word-vector table backing soft keyword matching.

The file format is the common plain-text layout: one entry per line,
token followed by its vector components, whitespace separated. All
entries must share one dimension. Lookups of unknown tokens return None,
never a zero vector, so callers can distinguish "no vector" from a real
embedding.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InputFormatError


class EmbeddingTable:
    """Immutable token -> unit-vector map."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray]):
        if dimension <= 0:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self._units: dict[str, np.ndarray] = {}
        for token, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dimension,):
                raise ValueError(
                    f"vector for {token!r} has shape {arr.shape}, expected ({dimension},)"
                )
            norm = float(np.linalg.norm(arr))
            # Zero vectors carry no direction; treat them as absent.
            if norm > 0.0:
                unit = arr / norm
                unit.setflags(write=False)
                self._units[token] = unit

    def __len__(self) -> int:
        return len(self._units)

    def __contains__(self, token: str) -> bool:
        return token in self._units

    def unit(self, token: str) -> np.ndarray | None:
        """Unit-normalized vector for token, or None when absent."""
        return self._units.get(token)

    def cosine(self, a: str, b: str) -> float | None:
        """Cosine similarity of two tokens, None when either lacks a vector."""
        ua = self._units.get(a)
        ub = self._units.get(b)
        if ua is None or ub is None:
            return None
        return float(np.dot(ua, ub))


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Parse a plain-text embedding file, validating a uniform dimension."""
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    dimension: int | None = None
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            parts = line.split()
            if not parts:
                continue
            token, *components = parts
            if not components:
                raise InputFormatError(
                    f"entry {token!r} has no vector components", path=str(path), line=lineno
                )
            try:
                values = np.array([float(c) for c in components], dtype=np.float64)
            except ValueError as exc:
                raise InputFormatError(
                    f"non-numeric vector component: {exc}", path=str(path), line=lineno
                ) from exc
            if dimension is None:
                dimension = len(values)
            elif len(values) != dimension:
                raise InputFormatError(
                    f"dimension {len(values)} does not match table dimension {dimension}",
                    path=str(path),
                    line=lineno,
                )
            if token in vectors:
                raise InputFormatError(
                    f"duplicate entry for token {token!r}", path=str(path), line=lineno
                )
            vectors[token] = values
    if dimension is None:
        raise InputFormatError("embedding file contains no entries", path=str(path))
    return EmbeddingTable(dimension, vectors)

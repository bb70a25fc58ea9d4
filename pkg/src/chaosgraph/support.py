"""Raw supports: sets of ordered ``d``-tuples over ``[n]``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Sequence

import numpy as np

from .errors import DiagonalSupport, LabelOutOfRange, NonSymmetricCoefficients, WrongOrder
from .homsum import HomogeneousSum, build_homsum


@dataclass(frozen=True, eq=False)
class Support:
    """Distinct ordered tuples, stored as a sorted ``(m, d)`` integer array."""

    d: int
    n_vertices: int
    tuples: np.ndarray
    labels: tuple | None = None

    @classmethod
    def of(cls, d: int, n: int, tuples, labels: Sequence | None = None) -> "Support":
        arr = np.asarray(tuples, dtype=np.int64).reshape(-1, d)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise LabelOutOfRange(f"vertex labels must lie in [0, {n})")
        arr = np.unique(arr, axis=0) if arr.size else arr
        return cls(d, int(n), arr, tuple(labels) if labels is not None else None)

    @classmethod
    def from_homsum(cls, z: HomogeneousSum) -> "Support":
        return cls.of(z.d, z.n_vertices, z.ordered[0], z.labels)

    @property
    def size(self) -> int:
        return int(self.tuples.shape[0])

    @cached_property
    def is_diagonal_free(self) -> bool:
        t = np.sort(self.tuples, axis=1)
        return not np.any(t[:, 1:] == t[:, :-1])

    @cached_property
    def is_symmetric(self) -> bool:
        keys = np.sort(self.tuples, axis=1)
        _, counts = np.unique(keys, axis=0, return_counts=True)
        # a diagonal-free support is symmetric iff every unordered key has d! orderings
        return self.is_diagonal_free and bool(np.all(counts == factorial(self.d)))

    def to_homsum(self, q: float = 1.0) -> HomogeneousSum:
        if not self.is_diagonal_free:
            raise DiagonalSupport("support contains a diagonal tuple")
        if not self.is_symmetric:
            raise NonSymmetricCoefficients("support is not closed under permutations")
        keys = np.unique(np.sort(self.tuples, axis=1), axis=0)
        return build_homsum(self.d, self.n_vertices, [(k, q) for k in keys.tolist()], self.labels)

    def to_graph(self, drop_isolated: bool = True):
        from .graphs import build_graph

        if self.d != 2:
            raise WrongOrder("only order-2 supports are graphs")
        z = self.to_homsum()
        return build_graph(self.n_vertices, z.keys, drop_isolated=drop_isolated, labels=self.labels)

    def degrees(self) -> np.ndarray:
        """Number of tuples whose first entry is each vertex."""
        return np.bincount(self.tuples[:, 0], minlength=self.n_vertices)

"""Weighted hypergraphs and their normalized Laplacian.

The adjacency matrix spreads each hyperedge weight evenly over the pairs it
contains: ``A[i, j] = sum over edges e containing i and j of w(e) / (|e| - 1)``.
With this choice the row sums of ``A`` are the weighted degrees, so the
normalized Laplacian has spectrum in ``[0, 2]`` exactly as for graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import spectra
from .errors import (
    DuplicateEdge,
    EmptySet,
    InvalidWeight,
    IsolatedVertex,
    LabelOutOfRange,
    LoopEdge,
)
from .expansion import CheegerReport, ExpansionEngine, Incidence, PartitionBound, PhiResult
from .graphs import Partition
from .homsum import HomogeneousSum

MIN_WEIGHT = 1e-15


@dataclass(frozen=True, eq=False)
class WeightedHypergraph:
    n_vertices: int
    edges: tuple[tuple[int, ...], ...]
    weights: np.ndarray
    labels: tuple | None = None

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def rank(self) -> int:
        return max(len(e) for e in self.edges)

    @property
    def corank(self) -> int:
        return min(len(e) for e in self.edges)

    @property
    def cheeger_factor(self) -> float:
        """``2 (r - 1)^2 / (cr - 1)`` for rank ``r`` and co-rank ``cr``."""
        return 2.0 * (self.rank - 1) ** 2 / (self.corank - 1)

    @cached_property
    def incidence(self) -> Incidence:
        return Incidence.from_edges(self.n_vertices, self.edges, self.weights)

    @property
    def degrees(self) -> np.ndarray:
        return self.incidence.degrees

    def adjacency(self) -> np.ndarray:
        spectra.check_dense_size(self.n_vertices)
        A = np.zeros((self.n_vertices, self.n_vertices))
        by_size: dict[int, list[int]] = {}
        for i, e in enumerate(self.edges):
            by_size.setdefault(len(e), []).append(i)
        for size, idx in by_size.items():
            verts = np.array([self.edges[i] for i in idx], dtype=np.int64)
            share = self.weights[idx] / (size - 1)
            for a, b in permutations(range(size), 2):
                np.add.at(A, (verts[:, a], verts[:, b]), share)
        return A

    @cached_property
    def component_labels(self) -> np.ndarray:
        inc = self.incidence
        bip = inc.matrix @ inc.matrix.T
        return connected_components(bip, directed=False)[1]

    @cached_property
    def _engine(self) -> ExpansionEngine:
        def laplacian_eigh():
            lap = spectra.normalized_laplacian(self.adjacency(), self.degrees)
            return spectra.eigh(lap, vectors=True)

        return ExpansionEngine(self.incidence, laplacian_eigh, self.component_labels)

    def __repr__(self) -> str:
        return (
            f"WeightedHypergraph(n_vertices={self.n_vertices}, n_edges={self.n_edges}, "
            f"rank={self.rank}, corank={self.corank})"
        )


def build_hypergraph(
    n: int,
    edges: Sequence[Sequence[int]],
    weights: Sequence[float] | np.ndarray | None = None,
    labels: Sequence | None = None,
) -> WeightedHypergraph:
    """Validate hyperedges (stored as sorted tuples) and positive weights."""
    if n < 1:
        raise LabelOutOfRange("a hypergraph needs at least one vertex")
    canon = []
    for e in edges:
        t = tuple(sorted(int(v) for v in e))
        if len(t) < 2:
            raise LoopEdge(f"hyperedge {t} has fewer than two vertices")
        if len(set(t)) != len(t):
            raise LoopEdge(f"hyperedge {t} repeats a vertex")
        if t[0] < 0 or t[-1] >= n:
            raise LabelOutOfRange(f"vertex labels must lie in [0, {n})")
        canon.append(t)
    if len(set(canon)) != len(canon):
        raise DuplicateEdge("a hyperedge is listed twice")
    w = np.ones(len(canon)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(canon),):
        raise InvalidWeight("one weight per hyperedge is required")
    if not np.all(np.isfinite(w)) or np.any(w < MIN_WEIGHT):
        raise InvalidWeight(f"weights must be finite and at least {MIN_WEIGHT}")
    if not canon:
        raise IsolatedVertex("a hypergraph needs at least one hyperedge")
    covered = np.zeros(n, dtype=bool)
    covered[np.concatenate([np.array(e) for e in canon])] = True
    if not covered.all():
        raise IsolatedVertex(f"vertex {int(np.argmin(covered))} lies in no hyperedge")
    return WeightedHypergraph(n, tuple(canon), w, tuple(labels) if labels is not None else None)


def hyper_adjacency(h: WeightedHypergraph) -> np.ndarray:
    return h.adjacency()


def hyper_laplacian_spectrum(h: WeightedHypergraph) -> spectra.SpectralReport:
    return spectra.report(h._engine.mu, "normalized_laplacian")


def hyper_adjacency_spectrum(h: WeightedHypergraph) -> spectra.SpectralReport:
    return spectra.report(spectra.eigh(h.adjacency()), "adjacency")


def hyper_boundary(h: WeightedHypergraph, S) -> list[int]:
    """Indices of hyperedges with vertices both inside and outside ``S``."""
    member = h.incidence.mask(S)
    if not member.any():
        raise EmptySet("boundary needs a nonempty set")
    return h.incidence.boundary_edges(member).tolist()


def hyper_volume(h: WeightedHypergraph, S) -> float:
    member = h.incidence.mask(S)
    if not member.any():
        raise EmptySet("volume needs a nonempty set")
    return h.incidence.volume(member)


def hyper_edge_expansion(h: WeightedHypergraph, S) -> float:
    member = h.incidence.mask(S)
    if not member.any():
        raise EmptySet("edge expansion needs a nonempty set")
    return h.incidence.expansion(member)


def hyper_phi_k(
    h: WeightedHypergraph, k: int, mode: str = "auto", exact_limit: int | None = None
) -> PhiResult:
    return h._engine.phi_k(k, mode, exact_limit)


def hyper_partition_bound(h: WeightedHypergraph, p: Partition | Sequence, k: int) -> PartitionBound:
    """Hypergraph analogue of the ordered-partition bound on ``mu_k``."""
    blocks = p.blocks if isinstance(p, Partition) else Partition.of(p).blocks
    return h._engine.partition_bound(blocks, k, h.cheeger_factor)


def hyper_cheeger_check(
    h: WeightedHypergraph,
    k_max: int,
    mode: str = "auto",
    exact_limit: int | None = None,
    partitions: Sequence[Partition] = (),
) -> CheegerReport:
    """Check ``mu_k <= 2 (r-1)^2/(cr-1) * phi_k`` and, optionally, partition bounds."""
    rep = h._engine.cheeger(k_max, h.cheeger_factor, mode, exact_limit, strong=False)
    checks = []
    for p in partitions:
        for k in range(1, len(p.blocks) + 1):
            checks.append(hyper_partition_bound(h, p, k))
    return CheegerReport(rep.rows, partition_checks=tuple(checks))


def homsum_to_hypergraph(z: HomogeneousSum) -> WeightedHypergraph:
    """Hyperedges are the supports, weighted by the squared coefficients."""
    return build_hypergraph(
        z.n_vertices, [tuple(k) for k in z.keys.tolist()], z.coefs**2, labels=z.labels
    )


def hypergraph_variance(h: WeightedHypergraph, d: int) -> float:
    """Second moment ``(d!)^2 w(E)`` of the matching order-``d`` sum."""
    return math.factorial(d) ** 2 * float(h.weights.sum())

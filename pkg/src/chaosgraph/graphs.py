"""Simple undirected graphs, their normalized Laplacian, and edge expansion."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import spectra
from .errors import (
    DuplicateEdge,
    EmptySet,
    InvalidM,
    IsolatedVertex,
    LabelOutOfRange,
    LoopEdge,
    OverlappingBlocks,
    SizeLimitExceeded,
)
from .expansion import (
    CheegerReport,
    ExpansionEngine,
    Incidence,
    PartitionBound,
    PhiResult,
)

MAX_VERTICES = 1 << 21
MAX_EDGES = 50_000_000


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple graph on vertices ``0..n_vertices-1``.

    ``edges`` is an ``(m, 2)`` integer array with ``u < v`` in every row and
    rows sorted lexicographically. ``labels`` optionally maps each vertex to
    the object it stands for (e.g. a grid coordinate). Build instances with
    :func:`build_graph`.
    """

    n_vertices: int
    edges: np.ndarray
    labels: tuple | None = None

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.reshape(-1), minlength=self.n_vertices)

    @cached_property
    def adjacency_sparse(self) -> sp.csr_matrix:
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * u.size)
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n_vertices,) * 2)

    def adjacency(self) -> np.ndarray:
        spectra.check_dense_size(self.n_vertices)
        A = np.zeros((self.n_vertices, self.n_vertices))
        A[self.edges[:, 0], self.edges[:, 1]] = 1.0
        A[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return A

    @cached_property
    def component_labels(self) -> np.ndarray:
        return connected_components(self.adjacency_sparse, directed=False)[1]

    @property
    def n_components(self) -> int:
        return int(self.component_labels.max()) + 1

    @cached_property
    def incidence(self) -> Incidence:
        return Incidence.from_pairs(self.n_vertices, self.edges)

    @cached_property
    def _engine(self) -> ExpansionEngine:
        def laplacian_eigh():
            lap = spectra.normalized_laplacian(self.adjacency(), self.degrees.astype(float))
            return spectra.eigh(lap, vectors=True)

        return ExpansionEngine(self.incidence, laplacian_eigh, self.component_labels)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def __repr__(self) -> str:
        return f"Graph(n_vertices={self.n_vertices}, n_edges={self.n_edges})"


def build_graph(
    n: int,
    edges: Iterable[Sequence[int]] | np.ndarray,
    drop_isolated: bool = False,
    labels: Sequence | None = None,
) -> Graph:
    """Validate an edge list and return a :class:`Graph`.

    With ``drop_isolated=True`` vertices of degree zero are removed and the
    remaining ones relabelled in increasing order; ``labels`` (or the original
    indices, if no labels are given) are carried along.
    """
    if n < 1:
        raise LabelOutOfRange("a graph needs at least one vertex")
    if n > MAX_VERTICES:
        raise SizeLimitExceeded(f"at most {MAX_VERTICES} vertices supported, got {n}")
    arr = np.asarray(edges if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise LabelOutOfRange("edges must be pairs of vertex labels")
    if arr.shape[0] > MAX_EDGES:
        raise SizeLimitExceeded(f"at most {MAX_EDGES} edges supported")
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise LabelOutOfRange(f"vertex labels must lie in [0, {n})")
    loops = arr[:, 0] == arr[:, 1]
    if loops.any():
        u = int(arr[loops][0, 0])
        raise LoopEdge(f"loop at vertex {u}")
    arr = np.sort(arr, axis=1)
    keys = arr[:, 0] * n + arr[:, 1]
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    dup = np.flatnonzero(keys[1:] == keys[:-1])
    if dup.size:
        u, v = divmod(int(keys[dup[0]]), n)
        raise DuplicateEdge(f"edge ({u}, {v}) listed twice")
    arr = arr[order]
    if labels is not None and len(labels) != n:
        raise LabelOutOfRange("labels must have one entry per vertex")
    deg = np.bincount(arr.reshape(-1), minlength=n)
    isolated = np.flatnonzero(deg == 0)
    if isolated.size:
        if not drop_isolated:
            raise IsolatedVertex(f"vertex {int(isolated[0])} has no incident edge")
        keep = deg > 0
        if not keep.any():
            raise IsolatedVertex("every vertex is isolated")
        new_index = np.cumsum(keep) - 1
        arr = new_index[arr]
        old = np.flatnonzero(keep)
        labels = tuple(labels[i] for i in old) if labels is not None else tuple(int(i) for i in old)
        n = int(keep.sum())
    elif labels is not None:
        labels = tuple(labels)
    return Graph(int(n), arr, labels)


def _member(g: Graph, S) -> np.ndarray:
    return g.incidence.mask(S)


def adjacency_spectrum(g: Graph) -> spectra.SpectralReport:
    return spectra.report(spectra.eigh(g.adjacency()), "adjacency")


def normalized_laplacian_spectrum(g: Graph) -> spectra.SpectralReport:
    """Ascending eigenvalues of ``I - D^{-1/2} A D^{-1/2}`` with multiplicities."""
    return spectra.report(g._engine.mu, "normalized_laplacian")


def edge_count(g: Graph, S, T) -> int:
    """Number of edges ``{s, t}`` with ``s in S`` and ``t in T`` (each counted once)."""
    s = _member(g, S)
    t = _member(g, T)
    u, v = g.edges[:, 0], g.edges[:, 1]
    return int(np.sum((s[u] & t[v]) | (s[v] & t[u])))


def volume(g: Graph, S) -> int:
    return int(g.degrees[_member(g, S)].sum())


def edge_expansion(g: Graph, S) -> float:
    """``E(S, S^c) / vol(S)``."""
    member = _member(g, S)
    if not member.any():
        raise EmptySet("edge expansion needs a nonempty set")
    return g.incidence.expansion(member)


def phi_k(g: Graph, k: int, mode: str = "auto", exact_limit: int | None = None) -> PhiResult:
    """Multiway expansion: min over ``k`` disjoint nonempty sets of ``max phi``.

    ``mode='exact'`` enumerates subsets (at most 12 vertices for ``k <= 3``,
    10 otherwise, unless ``exact_limit`` says differently); ``'heuristic'``
    returns an upper bound from spectral sweep cuts; ``'auto'`` picks exact
    when the graph is small enough.
    """
    return g._engine.phi_k(k, mode, exact_limit)


def phi2_tilde(g: Graph, mode: str = "auto", exact_limit: int | None = None) -> float:
    """``min phi(S)`` over ``0 < |S| <= |V|/2``."""
    return g._engine.phi2_tilde(mode, exact_limit)[0]


def cheeger_check(
    g: Graph, k_max: int, mode: str = "auto", exact_limit: int | None = None
) -> CheegerReport:
    """Check ``mu_k <= 2 phi_k`` for ``2 <= k <= k_max`` and ``phi~_2 <= sqrt(2 mu_2)``."""
    return g._engine.cheeger(k_max, 2.0, mode, exact_limit, strong=True)


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty vertex blocks."""

    blocks: tuple[frozenset[int], ...]
    n_vertices: int | None = None

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise EmptySet("partition blocks must be nonempty")
            if seen & b:
                raise OverlappingBlocks("partition blocks overlap")
            seen |= b
        if self.n_vertices is not None and seen and (min(seen) < 0 or max(seen) >= self.n_vertices):
            raise LabelOutOfRange(f"block labels must lie in [0, {self.n_vertices})")

    @classmethod
    def of(cls, blocks, n_vertices: int | None = None) -> "Partition":
        return cls(tuple(frozenset(int(v) for v in b) for b in blocks), n_vertices)

    @property
    def covered(self) -> frozenset[int]:
        return frozenset().union(*self.blocks) if self.blocks else frozenset()

    @property
    def cover_flag(self) -> bool:
        return self.n_vertices is not None and len(self.covered) == self.n_vertices

    def labels(self, n: int) -> np.ndarray:
        """Block index per vertex, ``-1`` for uncovered vertices."""
        lab = np.full(n, -1, dtype=np.int64)
        for i, b in enumerate(self.blocks):
            idx = np.fromiter(b, dtype=np.int64)
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                raise LabelOutOfRange(f"block labels must lie in [0, {n})")
            lab[idx] = i
        return lab


def partition_spectral_bound(g: Graph, p: Partition | Sequence, k: int) -> PartitionBound:
    """Spectral upper bound on ``mu_k`` from disjoint blocks.

    Blocks are sorted by ascending expansion first; the bound is twice the
    volume-weighted mean expansion of blocks ``k, k+1, ...`` in that order.
    """
    blocks = p.blocks if isinstance(p, Partition) else Partition.of(p).blocks
    return g._engine.partition_bound(blocks, k, 2.0)


# products ---------------------------------------------------------------------

def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product; vertex ``(u, w)`` is labelled ``u * |V_h| + w``."""
    ng, nh = g.n_vertices, h.n_vertices
    n = ng * nh
    m = ng * h.n_edges + nh * g.n_edges
    if n > MAX_VERTICES or m > MAX_EDGES:
        raise SizeLimitExceeded(f"product too large: {n} vertices, {m} edges")
    base_g = np.arange(ng, dtype=np.int64)[:, None, None] * nh
    within = (base_g + h.edges[None, :, :]).reshape(-1, 2)
    w = np.arange(nh, dtype=np.int64)[:, None, None]
    across = (g.edges[None, :, :] * nh + w).reshape(-1, 2)
    return build_graph(n, np.concatenate([within, across]))


def product_power(g: Graph, m: int) -> Graph:
    if m < 1:
        raise InvalidM(f"power must be at least 1, got {m}")
    out = g
    for _ in range(m - 1):
        out = cartesian_product(out, g)
    return out

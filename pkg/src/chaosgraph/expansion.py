"""Edge expansion machinery shared by graphs and weighted hypergraphs.

A graph is handled as a 2-uniform hypergraph with unit weights, so both
structures reduce to an :class:`Incidence`: a flat list of edge members plus
edge weights. The boundary of ``S`` is the set of edges with members on both
sides, and ``phi(S) = w(boundary) / vol(S)``.

Exact multiway expansion enumerates subsets as bitmasks. For a mask ``M`` let
``h_j(M)`` be the smallest achievable ``max phi`` over ``j`` disjoint nonempty
subsets of ``M``; then ``h_1`` is a submask minimum and
``h_j(M) = min_T max(phi(T), h_{j-1}(M \\ T))``, which costs ``O(k 3^n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.cluster.vq import kmeans2

from .errors import EmptySet, InvalidK, LabelOutOfRange, TooLargeForExact
from .rng import generator

EXACT_LIMIT_SMALL_K = 12
EXACT_LIMIT_LARGE_K = 10


def default_exact_limit(k: int) -> int:
    return EXACT_LIMIT_SMALL_K if k <= 3 else EXACT_LIMIT_LARGE_K


@dataclass(frozen=True, eq=False)
class Incidence:
    n: int
    ptr: np.ndarray
    verts: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges, weights=None) -> "Incidence":
        sizes = np.fromiter((len(e) for e in edges), dtype=np.int64, count=len(edges))
        ptr = np.zeros(len(edges) + 1, dtype=np.int64)
        np.cumsum(sizes, out=ptr[1:])
        verts = (
            np.concatenate([np.asarray(e, dtype=np.int64) for e in edges])
            if len(edges)
            else np.zeros(0, dtype=np.int64)
        )
        w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
        return cls(n, ptr, verts, w)

    @classmethod
    def from_pairs(cls, n: int, pairs: np.ndarray) -> "Incidence":
        m = pairs.shape[0]
        return cls(n, np.arange(0, 2 * m + 1, 2), pairs.reshape(-1).astype(np.int64), np.ones(m))

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.diff(self.ptr)

    @cached_property
    def edge_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.sizes.size), self.sizes)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.verts, weights=self.weights[self.edge_of], minlength=self.n)

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Vertex-by-edge 0/1 incidence matrix."""
        data = np.ones(self.verts.size)
        return sp.csr_matrix(
            (data, (self.verts, self.edge_of)), shape=(self.n, self.sizes.size)
        )

    def mask(self, S) -> np.ndarray:
        member = np.zeros(self.n, dtype=bool)
        idx = np.fromiter(S, dtype=np.int64) if not isinstance(S, np.ndarray) else S
        if idx.dtype == bool:
            if idx.shape != (self.n,):
                raise LabelOutOfRange("membership mask has the wrong length")
            return idx.copy()
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise LabelOutOfRange(f"vertex labels must lie in [0, {self.n})")
        member[idx] = True
        return member

    def boundary_edges(self, member: np.ndarray) -> np.ndarray:
        if not self.verts.size:
            return np.zeros(0, dtype=np.int64)
        inside = np.add.reduceat(member[self.verts].astype(np.int64), self.ptr[:-1])
        return np.flatnonzero((inside > 0) & (inside < self.sizes))

    def boundary_weight(self, member: np.ndarray) -> float:
        return float(self.weights[self.boundary_edges(member)].sum())

    def volume(self, member: np.ndarray) -> float:
        return float(self.degrees[member].sum())

    def expansion(self, member: np.ndarray) -> float:
        if not member.any():
            raise EmptySet("expansion of the empty set is undefined")
        return self.boundary_weight(member) / self.volume(member)


# exhaustive search -------------------------------------------------------------

def _subset_matrix(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64)


def all_subset_expansions(inc: Incidence) -> np.ndarray:
    """``phi`` for every bitmask (index 0, the empty set, maps to +inf)."""
    n = inc.n
    X = _subset_matrix(n)
    counts = np.asarray(inc.matrix.T.dot(X.T).T)  # (2^n, E)
    mixed = (counts > 0) & (counts < inc.sizes[None, :])
    boundary = mixed.astype(float) @ inc.weights
    vol = X @ inc.degrees
    phi = np.full(1 << n, np.inf)
    phi[1:] = boundary[1:] / vol[1:]
    return phi


def _submask_tables(n: int) -> list[np.ndarray]:
    return [_subset_matrix(p).astype(np.int64) for p in range(n + 1)]


def _submasks(mask: int, tables) -> np.ndarray:
    bits = [i for i in range(mask.bit_length()) if mask >> i & 1]
    weights = np.array([1 << b for b in bits], dtype=np.int64)
    return tables[len(bits)] @ weights if bits else np.zeros(1, dtype=np.int64)


def min_max_disjoint(phi: np.ndarray, n: int, k: int) -> tuple[float, list[int]]:
    """Exact ``min max_i phi(S_i)`` over ``k`` disjoint nonempty subsets."""
    full = (1 << n) - 1
    size = 1 << n
    # level 1: best nonempty submask of each mask
    best = phi.copy()
    arg = np.arange(size, dtype=np.int64)
    masks = np.arange(size, dtype=np.int64)
    for i in range(n):
        idx = masks[(masks >> i) & 1 == 1]
        other = idx ^ (1 << i)
        better = best[other] < best[idx]
        best[idx[better]] = best[other[better]]
        arg[idx[better]] = arg[other[better]]
    levels = [arg]
    tables = _submask_tables(n)
    for level in range(2, k + 1):
        targets = [full] if level == k else range(size)
        new_best = np.full(size, np.inf)
        new_arg = np.zeros(size, dtype=np.int64)
        for M in targets:
            if M == 0:
                continue
            subs = _submasks(M, tables)[1:]
            vals = np.maximum(phi[subs], best[M ^ subs])
            j = int(np.argmin(vals))
            new_best[M] = vals[j]
            new_arg[M] = subs[j]
        best = new_best
        levels.append(new_arg)
    value = float(best[full])
    if not np.isfinite(value):
        return value, []
    sets = []
    rest = full
    for lv in reversed(levels):
        T = int(lv[rest])
        sets.append(T)
        rest ^= T
    return value, sets


def small_set_expansion(phi: np.ndarray, n: int) -> tuple[float, int]:
    """``min phi(S)`` over ``0 < |S| <= n/2`` with an attaining mask."""
    masks = np.arange(1 << n, dtype=np.int64)
    pop = _subset_matrix(n).sum(axis=1)
    ok = (pop > 0) & (pop <= n / 2)
    cand = masks[ok]
    j = int(np.argmin(phi[cand]))
    return float(phi[cand[j]]), int(cand[j])


def mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


# heuristic --------------------------------------------------------------------

def _sweep(inc: Incidence, order: np.ndarray) -> tuple[float, np.ndarray]:
    """Best prefix cut ``max(phi(S), phi(S^c))`` along a vertex ordering."""
    n = inc.n
    by_vertex = inc.matrix
    count = np.zeros(inc.sizes.size, dtype=np.int64)
    boundary = 0.0
    vol = 0.0
    total = float(inc.degrees.sum())
    best, best_t = np.inf, 1
    for t, v in enumerate(order[:-1], start=1):
        edges = by_vertex.indices[by_vertex.indptr[v]:by_vertex.indptr[v + 1]]
        before = (count[edges] > 0) & (count[edges] < inc.sizes[edges])
        count[edges] += 1
        after = (count[edges] > 0) & (count[edges] < inc.sizes[edges])
        boundary += float(inc.weights[edges] @ (after.astype(float) - before.astype(float)))
        vol += inc.degrees[v]
        val = max(boundary / vol, boundary / (total - vol))
        if val < best:
            best, best_t = val, t
    member = np.zeros(n, dtype=bool)
    member[order[:best_t]] = True
    return best, member


def heuristic_phi_k(
    inc: Incidence, eigvecs: np.ndarray, k: int, components: np.ndarray, seed: int = 0
) -> tuple[float, list[np.ndarray]]:
    """Upper bound on ``phi_k`` from spectral embeddings (never claimed optimal)."""
    n = inc.n
    labels, counts = np.unique(components, return_counts=True)
    if labels.size >= k:
        sets = [components == lab for lab in labels[:k]]
        return max(inc.expansion(s) for s in sets), sets
    candidates: list[tuple[float, list[np.ndarray]]] = []
    y = eigvecs[:, :k] / np.sqrt(inc.degrees)[:, None]
    if k == 2:
        val, member = _sweep(inc, np.argsort(y[:, 1], kind="stable"))
        candidates.append((val, [member, ~member]))
    rows = eigvecs[:, :k]
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    rows = rows / np.where(norms > 0, norms, 1.0)
    rng = generator(seed)
    for _ in range(8):
        _, lab = kmeans2(rows, k, minit="++", seed=rng)
        sets = [lab == c for c in range(k)]
        if any(not s.any() for s in sets):
            continue
        candidates.append((max(inc.expansion(s) for s in sets), sets))
    if not candidates:
        # fall back to k-1 singletons plus the rest
        order = np.argsort(inc.degrees)
        sets = []
        for v in order[: k - 1]:
            s = np.zeros(n, dtype=bool)
            s[v] = True
            sets.append(s)
        rest = np.ones(n, dtype=bool)
        rest[order[: k - 1]] = False
        sets.append(rest)
        candidates.append((max(inc.expansion(s) for s in sets), sets))
    return min(candidates, key=lambda c: c[0])


# reports ----------------------------------------------------------------------

@dataclass(frozen=True)
class PhiResult:
    value: float
    sets: tuple[frozenset[int], ...]
    exact: bool

    @property
    def upper_bound(self) -> bool:
        return not self.exact


@dataclass(frozen=True)
class CheegerRow:
    k: int
    mu_k: float
    phi_k: float
    exact: bool
    factor: float
    ok: bool
    sweep_ratio: float | None = None


@dataclass(frozen=True)
class CheegerReport:
    rows: tuple[CheegerRow, ...]
    phi2_tilde: float | None = None
    phi2_tilde_exact: bool = False
    strong_ok: bool | None = None
    partition_checks: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        parts = all(c.ok for c in self.partition_checks)
        return all(r.ok for r in self.rows) and self.strong_ok is not False and parts

    def to_dict(self) -> dict:
        return {
            "rows": [r.__dict__ for r in self.rows],
            "phi2_tilde": self.phi2_tilde,
            "phi2_tilde_exact": self.phi2_tilde_exact,
            "strong_ok": self.strong_ok,
            "partition_checks": [c.to_dict() for c in self.partition_checks],
            "ok": self.ok,
        }


@dataclass(frozen=True)
class PartitionBound:
    k: int
    bound: float
    mu_k: float
    ok: bool
    order: tuple[int, ...]

    def to_dict(self) -> dict:
        return dict(self.__dict__, order=list(self.order))


TOL = 1e-9


class ExpansionEngine:
    """Multiway expansion and Cheeger checks over an :class:`Incidence`."""

    def __init__(self, inc: Incidence, laplacian_eigh, components: np.ndarray):
        self.inc = inc
        self._eigh = laplacian_eigh
        self.components = components
        self._phi_all = None

    @cached_property
    def eig(self):
        return self._eigh()

    @property
    def mu(self) -> np.ndarray:
        return self.eig[0]

    def phi_all(self) -> np.ndarray:
        if self._phi_all is None:
            self._phi_all = all_subset_expansions(self.inc)
        return self._phi_all

    def _use_exact(self, k: int, mode: str, exact_limit: int | None) -> bool:
        limit = default_exact_limit(k) if exact_limit is None else exact_limit
        if mode == "exact":
            if self.inc.n > limit:
                raise TooLargeForExact(
                    f"exact search limited to {limit} vertices, got {self.inc.n}"
                )
            return True
        if mode == "heuristic":
            return False
        if mode == "auto":
            return self.inc.n <= limit
        raise ValueError(f"unknown mode {mode!r}")

    def phi_k(self, k: int, mode: str = "auto", exact_limit: int | None = None) -> PhiResult:
        if k < 1 or k > self.inc.n:
            raise InvalidK(f"k must lie in [1, {self.inc.n}], got {k}")
        if self._use_exact(k, mode, exact_limit):
            value, masks = min_max_disjoint(self.phi_all(), self.inc.n, k)
            return PhiResult(value, tuple(mask_to_set(m) for m in masks), True)
        vecs = self.eig[1]
        value, sets = heuristic_phi_k(self.inc, vecs, k, self.components)
        return PhiResult(
            value, tuple(frozenset(np.flatnonzero(s).tolist()) for s in sets), False
        )

    def phi2_tilde(self, mode: str = "auto", exact_limit: int | None = None) -> tuple[float, frozenset, bool]:
        if self._use_exact(2, mode, exact_limit):
            val, mask = small_set_expansion(self.phi_all(), self.inc.n)
            return val, mask_to_set(mask), True
        # heuristic: the smaller side of the best sweep cut
        res = self.phi_k(2, "heuristic")
        s = min(res.sets, key=len)
        member = self.inc.mask(s)
        return self.inc.expansion(member), s, False

    def cheeger(
        self,
        k_max: int,
        factor: float = 2.0,
        mode: str = "auto",
        exact_limit: int | None = None,
        strong: bool = True,
    ) -> CheegerReport:
        if k_max < 1 or k_max > self.inc.n:
            raise InvalidK(f"k_max must lie in [1, {self.inc.n}], got {k_max}")
        rows = []
        for k in range(2, k_max + 1):
            res = self.phi_k(k, mode, exact_limit)
            mu_k = float(self.mu[k - 1])
            ratio = None
            if not res.exact and mu_k > 0:
                ratio = res.value / np.sqrt(mu_k)
            ok = mu_k <= factor * res.value + TOL
            rows.append(CheegerRow(k, mu_k, res.value, res.exact, factor, bool(ok), ratio))
        tilde = tilde_exact = strong_ok = None
        if strong and k_max >= 2:
            tilde, _, tilde_exact = self.phi2_tilde(mode, exact_limit)
            strong_ok = bool(tilde <= np.sqrt(2.0 * max(self.mu[1], 0.0)) + TOL)
        return CheegerReport(tuple(rows), tilde, bool(tilde_exact), strong_ok)

    def partition_bound(self, blocks, k: int, factor: float = 2.0) -> PartitionBound:
        blocks = [self.inc.mask(b) for b in blocks]
        if any(not b.any() for b in blocks):
            raise EmptySet("partition blocks must be nonempty")
        if k < 1 or k > len(blocks):
            raise InvalidK(f"k must lie in [1, {len(blocks)}], got {k}")
        phis = np.array([self.inc.expansion(b) for b in blocks])
        vols = np.array([self.inc.volume(b) for b in blocks])
        order = np.argsort(phis, kind="stable")
        tail = order[k - 1:]
        bound = factor * float(vols[tail] @ phis[tail]) / float(vols[tail].sum())
        mu_k = float(self.mu[k - 1])
        return PartitionBound(k, bound, mu_k, bool(mu_k <= bound + TOL), tuple(int(i) for i in order))

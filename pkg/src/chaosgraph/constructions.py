"""Generators for the graph, hypergraph and support families.

Square grids use vertex ``(a, b)`` with ``a, b`` in ``1..n`` and index
``(a - 1) * n + (b - 1)``; the first coordinate is the "row" index of the
rook-type constructions and the column index of the grid layouts (a vertical
line ``{a} x [n]``). Graph and sum objects carry these coordinates as labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations, permutations, product
from typing import Sequence

import numpy as np

from .errors import (
    BlockSizeError,
    DiagonalSupport,
    DisconnectedPartition,
    InvalidAlpha,
    InvalidK,
    InvalidM,
    LayoutSizeMismatch,
    RowCollision,
    SizeLimitExceeded,
    ValidationError,
)
from .graphs import Graph, build_graph, product_power
from .homsum import HomogeneousSum, build_homsum
from .rng import generator
from .support import Support

MAX_SUPPORT_TUPLES = 20_000_000


def _square_labels(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((a, b) for a in range(1, n + 1) for b in range(1, n + 1))


def _require(cond: bool, exc: type[ValidationError], msg: str) -> None:
    if not cond:
        raise exc(msg)


# classical families -------------------------------------------------------------

def complete(n: int) -> Graph:
    _require(n >= 2, InvalidM, f"complete graph needs n >= 2, got {n}")
    if n * (n - 1) // 2 > 50_000_000:
        raise SizeLimitExceeded(f"K_{n} is too large")
    iu = np.triu_indices(n, 1)
    return build_graph(n, np.column_stack(iu))


def complete_bipartite(n: int) -> Graph:
    """``K_{n,n}`` with sides ``0..n-1`` and ``n..2n-1``."""
    _require(n >= 1, InvalidM, f"complete bipartite graph needs n >= 1, got {n}")
    u, v = np.meshgrid(np.arange(n), np.arange(n, 2 * n), indexing="ij")
    return build_graph(2 * n, np.column_stack([u.ravel(), v.ravel()]))


def hypercube(n: int) -> Graph:
    """``Q_n = K_2^{□n}``; vertex ``x`` has bit ``n-1-i`` equal to coordinate ``i``."""
    _require(n >= 1, InvalidM, f"hypercube needs n >= 1, got {n}")
    return product_power(complete(2), n)


def rook(q: int, m: int = 2) -> Graph:
    """``K_q^{□m}``: ``q^m`` vertices, ``m(q-1)``-regular.

    For ``m = 2`` vertices carry 1-based grid labels ``(a, b)``.
    """
    _require(q >= 2, InvalidM, f"rook graph needs q >= 2, got {q}")
    _require(m >= 1, InvalidM, f"rook graph needs m >= 1, got {m}")
    g = product_power(complete(q), m)
    return replace(g, labels=_square_labels(q)) if m == 2 else g


def rook_variant_directed(n: int, k_n: int) -> set[tuple[int, int]]:
    """Ordered index pairs of the literal (asymmetric) rook-variant rule.

    ``((a, b), (i, j))`` is included when ``a == i`` and ``b != j``, or when
    ``a != i``, ``b == j`` and ``i <= k_n``.
    """
    _require(0 <= k_n <= n, InvalidK, f"k_n must lie in [0, {n}], got {k_n}")
    pairs = set()
    for a, b, i, j in product(range(1, n + 1), repeat=4):
        if (a == i and b != j) or (a != i and b == j and i <= k_n):
            pairs.add(((a - 1) * n + b - 1, (i - 1) * n + j - 1))
    return pairs


def rook_variant(n: int, k_n: int, symmetrize: bool = True) -> Graph:
    """Rook graph with vertical edges thinned out.

    Every vertex is joined to its whole row ``{a} x [n]``. A vertical pair
    ``(a, b), (i, b)`` is kept when at least one endpoint has first coordinate
    at most ``k_n`` (the union-symmetrization of the literal rule, see
    :func:`rook_variant_directed`). ``k_n = n`` gives ``rook(n, 2)``;
    ``k_n = 0`` gives ``n`` disjoint copies of ``K_n``.
    """
    _require(0 <= k_n <= n, InvalidK, f"k_n must lie in [0, {n}], got {k_n}")
    _require(n >= 2, InvalidM, f"rook variant needs n >= 2, got {n}")
    if not symmetrize:
        raise ValidationError("an undirected graph requires symmetrize=True; "
                              "use rook_variant_directed for the literal rule")
    idx = np.arange(n * n).reshape(n, n)  # idx[a-1, b-1]
    r1, r2 = np.triu_indices(n, 1)
    horizontal = np.column_stack([idx[:, r1].ravel(), idx[:, r2].ravel()])
    keep = np.minimum(r1, r2) < k_n  # 0-based first coordinates
    vertical = np.column_stack([idx[r1[keep], :].ravel(), idx[r2[keep], :].ravel()])
    return build_graph(n * n, np.concatenate([horizontal, vertical]), labels=_square_labels(n))


# grids ------------------------------------------------------------------------

@dataclass(frozen=True)
class GridLayout:
    """Line sets of the beta-grid.

    ``vertical[a-1]`` holds the second coordinates ``j`` with ``(a, j)`` in
    ``S_v(a)``; ``horizontal[b-1]`` holds the first coordinates ``i`` with
    ``(i, b)`` in ``S_h(b)``. All sets have ``floor(beta * n)`` elements.
    """

    n: int
    beta: float
    vertical: tuple[frozenset[int], ...]
    horizontal: tuple[frozenset[int], ...]

    def __post_init__(self):
        m = self.size
        if not 0 < self.beta <= 1:
            raise LayoutSizeMismatch(f"beta must lie in (0, 1], got {self.beta}")
        if len(self.vertical) != self.n or len(self.horizontal) != self.n:
            raise LayoutSizeMismatch("one vertical and one horizontal set per line")
        for s in self.vertical + self.horizontal:
            if len(s) != m:
                raise LayoutSizeMismatch(f"every line set must have {m} elements")
            if s and (min(s) < 1 or max(s) > self.n):
                raise LayoutSizeMismatch(f"line set entries must lie in [1, {self.n}]")

    @property
    def size(self) -> int:
        return math.floor(self.beta * self.n + 1e-12)

    @classmethod
    def contiguous(cls, n: int, beta: float) -> "GridLayout":
        m = math.floor(beta * n + 1e-12)
        prefix = frozenset(range(1, m + 1))
        return cls(n, beta, (prefix,) * n, (prefix,) * n)

    @classmethod
    def random(cls, n: int, beta: float, seed: int) -> "GridLayout":
        m = math.floor(beta * n + 1e-12)
        rng = generator(seed)
        pick = lambda: frozenset(int(x) + 1 for x in rng.choice(n, size=m, replace=False))
        return cls(n, beta, tuple(pick() for _ in range(n)), tuple(pick() for _ in range(n)))


def _line_graph(n: int, vertical, horizontal) -> Graph:
    edges = []
    for a, js in enumerate(vertical, start=1):
        js = sorted(js)
        edges.extend(((a - 1) * n + j1 - 1, (a - 1) * n + j2 - 1) for j1, j2 in combinations(js, 2))
    for b, is_ in enumerate(horizontal, start=1):
        is_ = sorted(is_)
        edges.extend(((i1 - 1) * n + b - 1, (i2 - 1) * n + b - 1) for i1, i2 in combinations(is_, 2))
    return build_graph(n * n, np.array(edges, dtype=np.int64).reshape(-1, 2),
                       drop_isolated=True, labels=_square_labels(n))


def grid_family(layout: GridLayout) -> Graph:
    """Pairs of distinct vertices sharing a line set; isolated vertices dropped.

    The graph has ``2 n C(m, 2)`` edges (``4 n C(m, 2)`` ordered pairs) with
    ``m = floor(beta n)``.
    """
    return _line_graph(layout.n, layout.vertical, layout.horizontal)


def union_with_isolated(n: int, m_n: int) -> Graph:
    """``(K_m ⊔ K̄_{n-m})^{□2}`` with isolated vertices removed.

    Equals :func:`grid_family` on the contiguous layout with ``floor(beta n) = m``.
    """
    _require(1 <= m_n <= n, InvalidM, f"m_n must lie in [1, {n}], got {m_n}")
    prefix = frozenset(range(1, m_n + 1))
    return _line_graph(n, (prefix,) * n, (prefix,) * n)


# fractional Cartesian products -------------------------------------------------

@dataclass(frozen=True)
class FractionalPartition:
    """Partition of the index grid ``[d] x [b]`` into ``d`` blocks of size ``b``.

    Cells are 1-based ``(row, column)`` pairs. Each block takes at most one cell
    per row, and the row/block incidence must be connected: no proper set of
    rows is exactly covered by a set of blocks.
    """

    d: int
    b: int
    blocks: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        d, b = self.d, self.b
        if d < 2 or not 1 <= b <= d - 1:
            raise BlockSizeError(f"need d >= 2 and 1 <= b <= d - 1, got d={d}, b={b}")
        if len(self.blocks) != d:
            raise BlockSizeError(f"need exactly {d} blocks, got {len(self.blocks)}")
        cells = [c for blk in self.blocks for c in blk]
        grid = {(l, s) for l in range(1, d + 1) for s in range(1, b + 1)}
        if sorted(cells) != sorted(grid):
            raise BlockSizeError("blocks must partition the index grid")
        for blk in self.blocks:
            if len(blk) != b:
                raise BlockSizeError(f"every block needs {b} cells, got {len(blk)}")
            rows = [l for l, _ in blk]
            if len(set(rows)) != len(rows):
                raise RowCollision(f"block {blk} has two cells in one row")
        if not self.is_connected():
            raise DisconnectedPartition("some proper set of rows is a union of blocks")

    @classmethod
    def of(cls, d: int, b: int, blocks) -> "FractionalPartition":
        return cls(d, b, tuple(tuple((int(l), int(s)) for l, s in blk) for blk in blocks))

    def block_of(self) -> dict[tuple[int, int], int]:
        return {c: i for i, blk in enumerate(self.blocks) for c in blk}

    def is_connected(self) -> bool:
        cell_block = self.block_of()
        rows = range(1, self.d + 1)
        for r in range(1, self.d):
            for chosen in combinations(rows, r):
                if 1 not in chosen:  # each bipartition once
                    continue
                chosen_set = set(chosen)
                blocks_in = {cell_block[(l, s)] for l in chosen for s in range(1, self.b + 1)}
                if all(
                    all(l in chosen_set for l, _ in self.blocks[i]) for i in blocks_in
                ):
                    return False
        return True


def _column_canonical(fp: FractionalPartition) -> tuple:
    forms = []
    for sigma in permutations(range(1, fp.b + 1)):
        relabel = tuple(sorted(tuple(sorted((l, sigma[s - 1]) for l, s in blk)) for blk in fp.blocks))
        forms.append(relabel)
    return min(forms)


def enumerate_fractional_partitions(
    d: int, b: int, up_to_columns: bool = False
) -> list[FractionalPartition]:
    """All valid connected partitions, blocks unlabelled (small grids only).

    With ``up_to_columns`` partitions that differ by a relabelling of the
    columns ``1..b`` (the same permutation in every row) are listed once.
    """
    if d * b > 12:
        raise SizeLimitExceeded("enumeration limited to grids with at most 12 cells")
    cells = [(l, s) for l in range(1, d + 1) for s in range(1, b + 1)]
    found = []

    def extend(remaining, blocks):
        if not remaining:
            try:
                found.append(FractionalPartition.of(d, b, blocks))
            except ValidationError:
                pass
            return
        first, rest = remaining[0], remaining[1:]
        for others in combinations(rest, b - 1):
            blk = (first,) + others
            if len({l for l, _ in blk}) < b:
                continue
            extend([c for c in rest if c not in others], blocks + [blk])

    extend(cells, [])
    if up_to_columns:
        seen = {}
        for fp in found:
            seen.setdefault(_column_canonical(fp), fp)
        found = list(seen.values())
    return found


def _injective_tuples(n: int, k: int) -> np.ndarray:
    return np.array(list(permutations(range(n), k)), dtype=np.int64).reshape(-1, k)


def fractional_product(
    n: int, fp: FractionalPartition | Sequence[FractionalPartition]
) -> HomogeneousSum:
    """Symmetrized fractional Cartesian product support with ``q = 1``.

    Vertices are the injective ``b``-tuples from ``[n]`` (labels are 1-based
    tuples). Block ``i`` receives a label ``x_i``, the ``x_i`` being pairwise
    distinct, and row ``l`` of the grid becomes the vertex whose ``s``-th entry
    is the label of the block holding cell ``(l, s)``. A sequence of partitions
    (same ``d`` and ``b``) yields the union of their supports.
    """
    parts = [fp] if isinstance(fp, FractionalPartition) else list(fp)
    d, b = parts[0].d, parts[0].b
    if any(p.d != d or p.b != b for p in parts):
        raise BlockSizeError("all partitions must share d and b")
    _require(n > b, InvalidM, f"need n > b, got n={n}, b={b}")
    n_assign = math.perm(n, d)
    if n_assign * len(parts) > MAX_SUPPORT_TUPLES:
        raise SizeLimitExceeded("fractional product too large")
    vertices = _injective_tuples(n, b)
    code = {tuple(v): i for i, v in enumerate(vertices.tolist())}
    weights = n ** np.arange(b - 1, -1, -1)
    lookup = np.full(n**b, -1, dtype=np.int64)
    lookup[vertices @ weights] = np.arange(len(vertices))
    X = _injective_tuples(n, d) if d <= n else np.zeros((0, d), dtype=np.int64)
    keys = []
    for p in parts:
        cb = p.block_of()
        pattern = np.array([[cb[(l, s)] for s in range(1, b + 1)] for l in range(1, d + 1)])
        rows = X[:, pattern]  # (assignments, d, b)
        idx = lookup[rows @ weights]  # vertex index of each row
        srt = np.sort(idx, axis=1)
        if np.any(srt[:, 1:] == srt[:, :-1]):
            raise DiagonalSupport("two rows of the partition produce the same vertex")
        keys.append(srt)
    all_keys = np.unique(np.concatenate(keys), axis=0) if keys else np.zeros((0, d), np.int64)
    labels = tuple(tuple(x + 1 for x in v) for v in code)
    return build_homsum(d, len(vertices), [(k, 1.0) for k in all_keys.tolist()], labels)


# hypergraph examples -------------------------------------------------------------

def triangle_hypergraph(n: int) -> HomogeneousSum:
    """Order-3 sum (``q = 1``) on ordered pairs ``(a, b)``, ``a != b``.

    Supports are the triples of pairs that pairwise share exactly one entry and
    use three labels in total: for each label triple ``{a, b, c}`` the three
    pairs ``{a, b}``, ``{b, c}``, ``{a, c}`` in any of their 8 orientations,
    so there are ``8 n (n-1) (n-2)`` ordered triples.
    """
    _require(n > 3, InvalidM, f"triangle hypergraph needs n > 3, got {n}")
    pairs = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b]
    index = {p: i for i, p in enumerate(pairs)}
    keys = []
    for a, b, c in combinations(range(1, n + 1), 3):
        for e1, e2, e3 in product(((a, b), (b, a)), ((b, c), (c, b)), ((a, c), (c, a))):
            keys.append((index[e1], index[e2], index[e3]))
    return build_homsum(3, len(pairs), [(k, 1.0) for k in keys], pairs)


def rooklike_hypergraph(n: int, d: int) -> HomogeneousSum:
    """Order-``d`` sum on ``[n]^2`` supported on ``d``-subsets of rows and columns.

    The coefficient ``sqrt((d-1) / C(n-2, d-2))`` makes the associated
    hypergraph adjacency equal to that of the rook graph ``K_n^{□2}``.
    """
    _require(d >= 2 and n > d, InvalidM, f"need d >= 2 and n > d, got n={n}, d={d}")
    count = 2 * n * math.comb(n, d)
    if count > MAX_SUPPORT_TUPLES:
        raise SizeLimitExceeded(f"{count} hyperedges exceed the limit")
    idx = np.arange(n * n).reshape(n, n)
    subsets = np.array(list(combinations(range(n), d)), dtype=np.int64)
    rows = idx[:, subsets].reshape(-1, d)
    cols = idx.T[:, subsets].reshape(-1, d)
    q = math.sqrt((d - 1) / math.comb(n - 2, d - 2))
    keys = np.concatenate([rows, cols])
    return build_homsum(d, n * n, [(k, q) for k in keys.tolist()], _square_labels(n))


# random supports -------------------------------------------------------------------

def random_support(
    n: int, alpha: float, d: int, seed: int, symmetrize_d2: bool = True
) -> Support:
    """Bernoulli support: every tuple of ``[n]^d`` kept with probability ``n^(alpha-d)``.

    For ``d = 2`` with ``symmetrize_d2`` the diagonal is discarded and the strict
    upper triangle mirrored, which is the Erdos-Renyi graph ``G(n, n^(alpha-2))``.
    """
    if d < 2 or not 1 < alpha < d:
        raise InvalidAlpha(f"alpha must lie in (1, {d}), got {alpha}")
    if n**d > MAX_SUPPORT_TUPLES * 10:
        raise SizeLimitExceeded(f"n^d = {n ** d} tuples is too many to sample")
    p = float(n) ** (alpha - d)
    rng = generator(seed)
    if d == 2 and symmetrize_d2:
        u, v = np.triu_indices(n, 1)
        keep = rng.random(u.size) < p
        u, v = u[keep], v[keep]
        return Support.of(2, n, np.concatenate([np.column_stack([u, v]), np.column_stack([v, u])]))
    flat = np.flatnonzero(rng.random(n**d) < p)
    tuples = np.column_stack(np.unravel_index(flat, (n,) * d))
    return Support.of(d, n, tuples)

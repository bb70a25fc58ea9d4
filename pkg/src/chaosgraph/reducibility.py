"""Box reductions of homogeneous sums and spectral irreducibility evidence.

A box ``B`` contributes ``sigma2(B) = d! * sum of q^2 over ordered tuples in
B^d`` to the variance. A family of sums is reducible when disjoint boxes
capture asymptotically all the variance while each box carries a vanishing
share; this module evaluates those two fractions on concrete partitions and
tracks them across family members. Nothing here proves a limit statement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import spectra
from .constructions import GridLayout, grid_family
from .errors import BetaOutOfRange, BlocksNotInVprime, InvalidM, LabelOutOfRange
from .expansion import Incidence
from .graphs import Graph, Partition, build_graph
from .homsum import HomogeneousSum
from .hypergraphs import WeightedHypergraph, build_hypergraph
from .rng import generator

Structure = Union[Graph, WeightedHypergraph, HomogeneousSum]

EVIDENCE_NOTE = "finite-family evidence, not a limit proof"


@dataclass(frozen=True, eq=False)
class _MassView:
    """Edges with variance mass: ``sigma2`` of an edge is ``factor * mass``."""

    inc: Incidence
    sigma: np.ndarray  # variance contribution of each edge

    @property
    def n(self) -> int:
        return self.inc.n

    @property
    def total(self) -> float:
        return float(self.sigma.sum())


def _view(obj: Structure) -> _MassView:
    if isinstance(obj, Graph):
        return _MassView(obj.incidence, np.full(obj.n_edges, 4.0))
    if isinstance(obj, WeightedHypergraph):
        fact = np.array([math.factorial(len(e)) ** 2 for e in obj.edges], dtype=float)
        return _MassView(obj.incidence, fact * obj.weights)
    if isinstance(obj, HomogeneousSum):
        K, d = obj.keys.shape
        inc = Incidence(
            obj.n_vertices, np.arange(0, K * d + 1, d), obj.keys.reshape(-1), obj.coefs**2
        )
        return _MassView(inc, math.factorial(d) ** 2 * obj.coefs**2)
    raise TypeError(f"unsupported structure {type(obj).__name__}")


def _as_partition(p, n: int) -> Partition:
    return p if isinstance(p, Partition) else Partition.of(p, n)


def _edge_block(view: _MassView, labels: np.ndarray) -> np.ndarray:
    """Block index of each edge lying inside one block, else ``-1``."""
    inc = view.inc
    if inc.verts.size == 0:
        return np.zeros(0, dtype=np.int64)
    lab = labels[inc.verts]
    lo = np.minimum.reduceat(lab, inc.ptr[:-1])
    hi = np.maximum.reduceat(lab, inc.ptr[:-1])
    return np.where((lo == hi) & (lo >= 0), lo, -1)


def sigma2(obj: Structure, B) -> float:
    """Variance contribution of the box ``B``."""
    view = _view(obj)
    member = view.inc.mask(B)
    labels = np.where(member, 0, -1)
    inside = _edge_block(view, labels) == 0
    return float(view.sigma[inside].sum())


def variance_of(obj: Structure) -> float:
    return _view(obj).total


@dataclass(frozen=True)
class BlockStats:
    block: int
    sigma2: float
    vol: float
    phi: float


@dataclass(frozen=True)
class ReducibilityReport:
    m: int
    variance: float
    captured_fraction: float
    max_box_fraction: float
    per_block: tuple[BlockStats, ...]

    @property
    def captured(self) -> float:
        return self.captured_fraction * self.variance

    @property
    def max_box(self) -> float:
        return self.max_box_fraction * self.variance

    def to_dict(self, with_blocks: bool = True) -> dict:
        out = {
            "m": self.m,
            "variance": self.variance,
            "captured_fraction": self.captured_fraction,
            "max_box_fraction": self.max_box_fraction,
            "restricted_sum_gap": 1.0 - self.captured_fraction,
        }
        if with_blocks:
            out["per_block"] = [b.__dict__ for b in self.per_block]
        return out


def evaluate_partition(obj: Structure, p: Partition | Sequence) -> ReducibilityReport:
    """Captured and largest-box variance fractions of a set of disjoint boxes."""
    view = _view(obj)
    part = _as_partition(p, view.n)
    labels = part.labels(view.n)
    m = len(part.blocks)
    eb = _edge_block(view, labels)
    inside = eb >= 0
    s2 = np.bincount(eb[inside], weights=view.sigma[inside], minlength=m)
    vol = np.bincount(labels[labels >= 0], weights=view.inc.degrees[labels >= 0], minlength=m)
    # boundary weight per block: edges touching a block without lying inside it
    inc = view.inc
    touch_edge = inc.edge_of
    touch_lab = labels[inc.verts]
    sel = (touch_lab >= 0) & ~inside[touch_edge]
    pairs = np.unique(np.column_stack([touch_edge[sel], touch_lab[sel]]), axis=0)
    bnd = (
        np.bincount(pairs[:, 1], weights=inc.weights[pairs[:, 0]], minlength=m)
        if pairs.size
        else np.zeros(m)
    )
    total = view.total
    per_block = tuple(
        BlockStats(i, float(s2[i]), float(vol[i]), float(bnd[i] / vol[i]) if vol[i] > 0 else 0.0)
        for i in range(m)
    )
    captured = float(s2.sum()) / total
    max_box = float(s2.max()) / total if m else 0.0
    return ReducibilityReport(m, total, captured, max_box, per_block)


def restricted_sum_gap(obj: Structure, p: Partition | Sequence) -> float:
    """``E[(Z~ - T~)^2]`` for the box-restricted sum ``T``, i.e. ``1 - captured``."""
    if not (p.blocks if isinstance(p, Partition) else list(p)):
        return 1.0
    return 1.0 - evaluate_partition(obj, p).captured_fraction


# family trends ------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyTrend:
    sizes: tuple[int, ...]
    reports: tuple[ReducibilityReport, ...]
    blocks_increasing: bool
    captured_increasing: bool
    max_box_decreasing: bool
    reducible_evidence: bool
    captured_threshold: float
    max_box_threshold: float
    note: str = EVIDENCE_NOTE

    def to_dict(self) -> dict:
        return {
            "rows": [
                dict(n=n, **r.to_dict(with_blocks=False)) for n, r in zip(self.sizes, self.reports)
            ],
            "blocks_increasing": self.blocks_increasing,
            "captured_increasing": self.captured_increasing,
            "max_box_decreasing": self.max_box_decreasing,
            "reducible_evidence": self.reducible_evidence,
            "captured_threshold": self.captured_threshold,
            "max_box_threshold": self.max_box_threshold,
            "note": self.note,
        }


def family_trend(
    rows: Sequence[tuple[int, ReducibilityReport]],
    captured_threshold: float = 0.95,
    max_box_threshold: float = 0.05,
) -> FamilyTrend:
    """Trend verdict over at least three members ordered by size."""
    if len(rows) < 3:
        raise InvalidM("a trend needs at least three family members")
    rows = sorted(rows, key=lambda r: r[0])
    reps = [r for _, r in rows]
    cap = [r.captured_fraction for r in reps]
    mb = [r.max_box_fraction for r in reps]
    ms = [r.m for r in reps]
    tol = 1e-12
    blocks_up = all(b > a for a, b in zip(ms, ms[1:]))
    cap_up = all(b >= a - tol for a, b in zip(cap, cap[1:]))
    mb_down = all(b <= a + tol for a, b in zip(mb, mb[1:]))
    verdict = (
        blocks_up and cap_up and mb_down
        and cap[-1] >= captured_threshold and mb[-1] <= max_box_threshold
    )
    return FamilyTrend(
        tuple(n for n, _ in rows), tuple(reps), blocks_up, cap_up, mb_down, verdict,
        captured_threshold, max_box_threshold,
    )


# named reductions -----------------------------------------------------------------

def hypercube_boxes(n: int, h: int) -> Partition:
    """Boxes of ``Q_n`` fixing the first ``h`` coordinates (``2^h`` boxes)."""
    if not 0 <= h <= n:
        raise InvalidM(f"h must lie in [0, {n}], got {h}")
    x = np.arange(1 << n)
    top = x >> (n - h)
    return Partition(tuple(frozenset(x[top == z].tolist()) for z in range(1 << h)), 1 << n)


def _coords(obj) -> np.ndarray:
    labels = obj.labels
    if labels is None or not all(isinstance(l, tuple) and len(l) == 2 for l in labels):
        raise LabelOutOfRange("this reduction needs grid coordinates as vertex labels")
    return np.array(labels, dtype=np.int64)


def _group(keys: np.ndarray, n: int) -> Partition:
    blocks = []
    for k in np.unique(keys):
        blocks.append(frozenset(np.flatnonzero(keys == k).tolist()))
    return Partition(tuple(blocks), n)


def row_boxes(g: Graph | HomogeneousSum) -> Partition:
    """Boxes ``{a} x [n]`` grouped by the first coordinate."""
    return _group(_coords(g)[:, 0], g.n_vertices)


def column_boxes(g: Graph | HomogeneousSum) -> Partition:
    """Boxes ``[n] x {b}`` grouped by the second coordinate."""
    return _group(_coords(g)[:, 1], g.n_vertices)


def block_grid_boxes(g: Graph | HomogeneousSum, k: int, side: int | None = None) -> Partition:
    """``k x k`` array of square tiles covering ``[side]^2``."""
    c = _coords(g)
    side = side or int(c.max())
    tile = np.ceil(side / k)
    key = ((c[:, 0] - 1) // tile) * k + (c[:, 1] - 1) // tile
    return _group(key.astype(np.int64), g.n_vertices)


def component_boxes(g: Graph) -> Partition:
    return _group(g.component_labels, g.n_vertices)


def random_balanced_partition(n_vertices: int, m: int, seed: int) -> Partition:
    """Uniformly shuffled vertices cut into ``m`` blocks of near-equal size."""
    if not 1 <= m <= n_vertices:
        raise InvalidM(f"m must lie in [1, {n_vertices}], got {m}")
    perm = generator(seed).permutation(n_vertices)
    return Partition(tuple(frozenset(b.tolist()) for b in np.array_split(perm, m)), n_vertices)


# spectral certificates ---------------------------------------------------------------

@dataclass(frozen=True)
class ComponentShare:
    n_vertices: int
    variance_fraction: float
    mu_2: float | None


def component_split(obj: Graph | WeightedHypergraph) -> list[ComponentShare]:
    """Variance share and spectral gap of each connected component (largest share first)."""
    view = _view(obj)
    labels = obj.component_labels
    comps = Partition.of([np.flatnonzero(labels == c) for c in range(labels.max() + 1)], view.n)
    rep = evaluate_partition(obj, comps)
    out = []
    for stats, block in zip(rep.per_block, comps.blocks):
        mu2 = None
        if len(block) >= 2 and len(block) <= spectra.MAX_DENSE_VERTICES:
            mu2 = _induced_mu(obj, sorted(block), 2)
        out.append(ComponentShare(len(block), stats.sigma2 / rep.variance, mu2))
    out.sort(key=lambda c: -c.variance_fraction)
    return out


def _induced_mu(obj, verts: list[int], k: int) -> float:
    index = {v: i for i, v in enumerate(verts)}
    if isinstance(obj, Graph):
        keep = np.isin(obj.edges[:, 0], verts)
        edges = np.vectorize(index.get)(obj.edges[keep]) if keep.any() else []
        sub = build_graph(len(verts), edges)
        lap = spectra.normalized_laplacian(sub.adjacency(), sub.degrees.astype(float))
    else:
        es = [(e, w) for e, w in zip(obj.edges, obj.weights) if e[0] in index]
        sub = build_hypergraph(len(verts), [[index[v] for v in e] for e, _ in es], [w for _, w in es])
        lap = spectra.normalized_laplacian(sub.adjacency(), sub.degrees)
    return float(spectra.eigh(lap)[k - 1])


@dataclass(frozen=True)
class CertificateMember:
    index: int
    n_vertices: int
    mu_k: float
    largest_component_fraction: float
    largest_component_mu2: float | None


@dataclass(frozen=True)
class CertificateReport:
    k: int
    threshold: float
    members: tuple[CertificateMember, ...]
    proxy: float
    granted: bool
    component_proxy: float
    component_fraction: float
    component_evidence: bool
    note: str = EVIDENCE_NOTE

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "threshold": self.threshold,
            "members": [m.__dict__ for m in self.members],
            "liminf_proxy": self.proxy,
            "certificate": self.granted,
            "largest_component_fraction_min": self.component_fraction,
            "largest_component_mu2_min": self.component_proxy,
            "component_split_evidence": self.component_evidence,
            "note": self.note,
        }


def spectral_certificate(
    family: Sequence[Graph | WeightedHypergraph],
    k: int = 2,
    threshold: float = 1e-3,
    component_fraction: float = 0.25,
) -> CertificateReport:
    """Spectral irreducibility evidence over finitely many family members.

    The certificate is granted when ``min_n mu_k`` over the members is at
    least ``threshold``. Independently, each member's connected component with
    the largest variance share is inspected: ``component_evidence`` holds when
    in every member that component carries at least ``component_fraction`` of
    the variance and has spectral gap ``mu_2 >= threshold``. The two answers
    can differ (a family may fail the certificate while a spectrally
    well-connected component carries a fixed share of the variance), and both
    are reported without inferring one from the other.
    """
    if not family:
        raise InvalidM("the family must have at least one member")
    members = []
    for i, obj in enumerate(family):
        mu = obj._engine.mu
        if k > mu.size:
            raise InvalidM(f"member {i} has fewer than {k} vertices")
        comps = component_split(obj)
        top = comps[0]
        members.append(
            CertificateMember(i, obj.n_vertices, float(mu[k - 1]), top.variance_fraction, top.mu_2)
        )
    proxy = min(m.mu_k for m in members)
    comp_mu = [m.largest_component_mu2 if m.largest_component_mu2 is not None else 0.0 for m in members]
    comp_frac = min(m.largest_component_fraction for m in members)
    return CertificateReport(
        k,
        threshold,
        tuple(members),
        proxy,
        proxy >= threshold,
        min(comp_mu),
        comp_frac,
        comp_frac >= component_fraction and min(comp_mu) >= threshold,
    )


# partial reductions ---------------------------------------------------------------

@dataclass(frozen=True)
class PartialReductionReport:
    volume_fraction: float
    boundary_fraction: float
    internal_deficit: int
    internal_deficit_fraction: float
    max_block_fraction: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def partial_reduction_eval(g: Graph, vprime, p: Partition | Sequence) -> PartialReductionReport:
    """Statistics of a reduction confined to a vertex subset ``V'``.

    Reports ``vol(V')/vol(V)``, ``E(V', V'^c)/|E|``, the edges inside ``V'``
    missed by the blocks (absolute and as a fraction of ``|E|``), and the
    largest ``E(B, B)/|E|``.
    """
    member = g.incidence.mask(vprime)
    part = _as_partition(p, g.n_vertices)
    if not part.covered <= frozenset(np.flatnonzero(member).tolist()):
        raise BlocksNotInVprime("every block must lie inside V'")
    u, v = g.edges[:, 0], g.edges[:, 1]
    m_edges = g.n_edges
    inside = member[u] & member[v]
    crossing = member[u] ^ member[v]
    labels = part.labels(g.n_vertices)
    same = (labels[u] == labels[v]) & (labels[u] >= 0)
    per_block = np.bincount(labels[u][same], minlength=len(part.blocks))
    deficit = int(inside.sum() - same.sum())
    return PartialReductionReport(
        float(g.degrees[member].sum() / g.degrees.sum()),
        float(crossing.sum() / m_edges),
        deficit,
        deficit / m_edges,
        float(per_block.max() / m_edges) if per_block.size else 0.0,
    )


# quantitative grid bound ------------------------------------------------------------

@dataclass(frozen=True)
class GridCandidateResult:
    name: str
    m: int
    captured: float
    max_box: float
    precondition: bool
    bound_ok: bool | None
    margin: float | None


@dataclass(frozen=True)
class GridBoundReport:
    n: int
    beta: float
    eta: float
    slack: float
    capture_threshold: float
    box_threshold: float
    results: tuple[GridCandidateResult, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(r.bound_ok is not False for r in self.results)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "beta": self.beta,
            "eta": self.eta,
            "slack": self.slack,
            "capture_threshold_over_n3": self.capture_threshold,
            "box_threshold_over_n3": self.box_threshold,
            "results": [r.__dict__ for r in self.results],
            "ok": self.ok,
        }


def grid_candidates(g: Graph, n: int, seed: int = 0, n_random: int = 20,
                    block_sizes: Sequence[int] = (1, 2, 3, 5)) -> dict[str, Partition]:
    """Standard candidates: ``k x k`` tiles, rows, columns and random balanced splits."""
    out: dict[str, Partition] = {}
    for k in block_sizes:
        out[f"blocks{k}x{k}"] = block_grid_boxes(g, k, side=n)
    out["rows"] = row_boxes(g)
    out["columns"] = column_boxes(g)
    rng = generator(seed)
    for i in range(n_random):
        m = int(rng.integers(2, n + 1))
        out[f"random{i}_m{m}"] = random_balanced_partition(g.n_vertices, m, seed ^ (i + 1))
    return out


def grid_bound_check(
    layout: GridLayout,
    candidates: dict[str, Partition] | Sequence[Partition] | None = None,
    eta: float = 0.3,
    slack: float = 0.15,
    seed: int = 0,
) -> GridBoundReport:
    """Check the lower bound on the largest box for beta-grids with ``beta > 1/2``.

    A candidate meeting ``captured >= (4 beta^2 - eta) n^3`` must have a box with
    ``sigma2 >= (2 beta^2 (2 beta - 1) - slack) n^3``. Candidates failing the
    capture condition are reported without an assertion.
    """
    beta, n = layout.beta, layout.n
    if beta <= 0.5:
        raise BetaOutOfRange(f"the bound needs beta > 1/2, got {beta}")
    g = grid_family(layout)
    if candidates is None:
        candidates = grid_candidates(g, n, seed)
    if not isinstance(candidates, dict):
        candidates = {f"candidate{i}": c for i, c in enumerate(candidates)}
    n3 = float(n) ** 3
    cap_thr = 4 * beta**2 - eta
    box_thr = 2 * beta**2 * (2 * beta - 1) - slack
    results = []
    for name, part in candidates.items():
        rep = evaluate_partition(g, part)
        cap = rep.captured / n3
        mb = rep.max_box / n3
        pre = cap >= cap_thr
        ok = (mb >= box_thr) if pre else None
        results.append(GridCandidateResult(name, rep.m, cap, mb, pre, ok, (mb - box_thr) if pre else None))
    return GridBoundReport(n, beta, eta, slack, cap_thr, box_thr, tuple(results))

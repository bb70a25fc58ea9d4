"""Combinatorial-dimension diagnostics for supports ``J`` of ordered tuples.

A family ``J_n`` over ``V_n`` has dimension ``alpha`` when rectangles satisfy
``|J ∩ A_1 x ... x A_d| <= c max|A_i|^alpha`` while ``|J_n| >= c' |V_n|^alpha``.
Both sides are measured here: the density ratio ``|J|/|V|^alpha`` and the
largest rectangle ratio, exact on tiny vertex sets and a local-search lower
bound otherwise. Finite data can only suggest a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FamilyTooSmall, InvalidAlpha, InvalidEpsilon, LabelOutOfRange, TooLargeForExact
from .graphs import Graph
from .homsum import HomogeneousSum
from .rng import generator
from .support import Support

EXACT_LIMITS = {2: 10, 3: 7}
GROWTH_TOL = 0.15


def _as_support(J) -> Support:
    if isinstance(J, Support):
        return J
    if isinstance(J, HomogeneousSum):
        return Support.from_homsum(J)
    if isinstance(J, Graph):
        e = J.edges
        return Support.of(2, J.n_vertices, np.concatenate([e, e[:, ::-1]]), J.labels)
    raise TypeError(f"unsupported support type {type(J).__name__}")


def _membership(n: int, A) -> np.ndarray:
    member = np.zeros(n, dtype=bool)
    idx = np.fromiter(A, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise LabelOutOfRange(f"vertex labels must lie in [0, {n})")
    member[idx] = True
    return member


def rectangle_count(J, *sets) -> int:
    """``|J ∩ A_1 x ... x A_d|``."""
    sup = _as_support(J)
    if len(sets) != sup.d:
        raise ValueError(f"need {sup.d} sets, got {len(sets)}")
    ok = np.ones(sup.size, dtype=bool)
    for i, A in enumerate(sets):
        ok &= _membership(sup.n_vertices, A)[sup.tuples[:, i]]
    return int(ok.sum())


@dataclass(frozen=True)
class RectRatio:
    value: float
    witness: tuple[frozenset[int], ...]
    exact: bool


def _exact_sup(sup: Support, alpha: float) -> RectRatio:
    n, d = sup.n_vertices, sup.d
    size = 1 << n
    X = ((np.arange(size)[:, None] >> np.arange(n)) & 1).astype(np.float64)
    pop = X.sum(axis=1)
    T = np.zeros((n,) * d)
    np.add.at(T, tuple(sup.tuples.T), 1.0)
    # contract the first d-1 coordinates against every subset mask
    C = T
    for axis in range(d - 1):
        C = np.tensordot(C, X, axes=([axis], [1]))
        C = np.moveaxis(C, -1, axis)
    # C[m_1, ..., m_{d-1}, v]
    counts = -np.sort(-C, axis=-1)
    prefix = np.cumsum(counts, axis=-1)
    s = np.arange(1, n + 1, dtype=float)
    maxsize = pop
    for _ in range(1, d - 1):
        maxsize = np.maximum.outer(maxsize, pop)
    denom = np.maximum(maxsize[..., None], s) ** alpha
    ratios = prefix / denom  # empty sets give zero counts
    flat = int(np.argmax(ratios))
    pos = np.unravel_index(flat, ratios.shape)
    sets = [frozenset(np.flatnonzero(X[m]).tolist()) for m in pos[:-1]]
    top = int(pos[-1]) + 1
    cvec = C[tuple(pos[:-1])]
    order = np.argsort(-cvec, kind="stable")[:top]
    sets.append(frozenset(order.tolist()))
    return RectRatio(float(ratios[pos]), tuple(sets), True)


class _Search:
    """Greedy single-element add/remove search maximizing the rectangle ratio."""

    def __init__(self, sup: Support, alpha: float):
        self.t = sup.tuples
        self.n = sup.n_vertices
        self.d = sup.d
        self.alpha = alpha

    def ratio(self, count, sizes):
        m = max(sizes)
        return count / m**self.alpha if m > 0 else 0.0

    def run(self, sets: list[np.ndarray], max_iter: int = 10_000):
        d, n, t = self.d, self.n, self.t
        inside = np.stack([sets[i][t[:, i]] for i in range(d)])
        sat = inside.sum(axis=0)
        sizes = [int(s.sum()) for s in sets]
        count = int((sat == d).sum())
        best = self.ratio(count, sizes)
        for _ in range(max_iter):
            move = None
            full = sat == d
            for i in range(d):
                others = (sat - inside[i]) == d - 1
                gain = np.bincount(t[others & ~inside[i], i], minlength=n)
                loss = np.bincount(t[full, i], minlength=n)
                new_sizes = list(sizes)
                # additions
                new_sizes[i] = sizes[i] + 1
                m_add = max(new_sizes)
                cand = np.flatnonzero(~sets[i] & (gain > 0))
                if cand.size:
                    vals = (count + gain[cand]) / m_add**self.alpha
                    j = int(np.argmax(vals))
                    if vals[j] > best + 1e-12:
                        best, move = float(vals[j]), (i, int(cand[j]), True)
                # removals
                if sizes[i] > 1:
                    new_sizes[i] = sizes[i] - 1
                    m_rem = max(new_sizes)
                    cand = np.flatnonzero(sets[i])
                    vals = (count - loss[cand]) / m_rem**self.alpha
                    j = int(np.argmax(vals))
                    if vals[j] > best + 1e-12:
                        best, move = float(vals[j]), (i, int(cand[j]), False)
            if move is None:
                break
            i, v, add = move
            sets[i][v] = add
            sizes[i] += 1 if add else -1
            hit = t[:, i] == v
            inside[i, hit] = add
            sat[hit] += 1 if add else -1
            count = int((sat == d).sum())
        return best, sets


def _heuristic_sup(sup: Support, alpha: float, starts, seed: int, n_random: int) -> RectRatio:
    n, d = sup.n_vertices, sup.d
    search = _Search(sup, alpha)
    rng = generator(seed)
    seeds: list[list[np.ndarray]] = [[np.ones(n, dtype=bool) for _ in range(d)]]
    # closed neighbourhoods of sampled vertices
    verts = np.unique(sup.tuples[:, 0])
    pick = rng.choice(verts, size=min(16, verts.size), replace=False) if verts.size else []
    for v in pick:
        nb = np.zeros(n, dtype=bool)
        rows = sup.tuples[np.any(sup.tuples == v, axis=1)]
        nb[rows.reshape(-1)] = True
        seeds.append([nb.copy() for _ in range(d)])
    for A in starts or ():
        seeds.append([_membership(n, a) for a in A])
    for _ in range(n_random):
        p = rng.uniform(0.1, 0.9)
        seeds.append([rng.random(n) < p for _ in range(d)])
    best = (-1.0, None)
    for s in seeds:
        if any(not a.any() for a in s):
            continue
        val, sets = search.run([a.copy() for a in s])
        if val > best[0]:
            best = (val, sets)
    witness = tuple(frozenset(np.flatnonzero(a).tolist()) for a in best[1])
    return RectRatio(best[0], witness, False)


def rect_ratio_sup(
    J,
    alpha: float,
    mode: str = "auto",
    starts: Sequence[Sequence] | None = None,
    seed: int = 0,
    n_random: int = 32,
    exact_limit: int | None = None,
) -> RectRatio:
    """Largest ``|J ∩ A_1 x ... x A_d| / max|A_i|^alpha`` over nonempty rectangles.

    ``exact`` enumerates the first ``d - 1`` sets and fills the last one
    optimally (for a fixed size the best choice is the vertices with the
    largest counts); it is limited to 10 vertices for ``d = 2`` and 7 for
    ``d = 3``. ``heuristic`` runs greedy add/remove moves from the full
    rectangle, vertex neighbourhoods, user ``starts`` and random sets, and
    returns an achieved value, i.e. a lower bound on the supremum.
    """
    sup = _as_support(J)
    limit = exact_limit if exact_limit is not None else EXACT_LIMITS.get(sup.d, 0)
    if mode == "exact" or (mode == "auto" and sup.n_vertices <= limit):
        if sup.n_vertices > limit:
            raise TooLargeForExact(
                f"exact rectangle search limited to {limit} vertices for d={sup.d}"
            )
        return _exact_sup(sup, alpha)
    if mode not in ("heuristic", "auto"):
        raise ValueError(f"unknown mode {mode!r}")
    return _heuristic_sup(sup, alpha, starts, seed, n_random)


# family report -----------------------------------------------------------------------

@dataclass(frozen=True)
class CombDimRow:
    n_vertices: int
    size: int
    density_ratio: float
    rect_ratio: float
    rect_exact: bool


@dataclass(frozen=True)
class CombDimReport:
    alpha_hat: float
    intercept: float
    residuals: tuple[float, ...]
    alpha: float
    rows: tuple[CombDimRow, ...]
    density_slope: float
    rect_slope: float
    verdict: str

    @property
    def density_ratios(self) -> list[float]:
        return [r.density_ratio for r in self.rows]

    @property
    def rect_ratio_stats(self) -> list[float]:
        return [r.rect_ratio for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "intercept": self.intercept,
            "residuals": list(self.residuals),
            "alpha": self.alpha,
            "rows": [r.__dict__ for r in self.rows],
            "density_slope": self.density_slope,
            "rect_slope": self.rect_slope,
            "verdict": self.verdict,
        }


def fit_alpha(sizes_v: Sequence[int], sizes_j: Sequence[int]) -> tuple[float, float, np.ndarray]:
    """OLS fit of ``log|J| = alpha log|V| + c``; returns ``(alpha, c, residuals)``."""
    x = np.log(np.asarray(sizes_v, dtype=float))
    y = np.log(np.asarray(sizes_j, dtype=float))
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(coef[1]), y - A @ coef


def combdim_family_report(
    family: Sequence,
    alpha: float | None = None,
    mode: str = "auto",
    starts: Sequence | None = None,
    seed: int = 0,
    growth_tol: float = GROWTH_TOL,
    exact_limit: int | None = None,
) -> CombDimReport:
    """Fit ``alpha`` and measure both dimension requirements across a family.

    ``starts`` may be a list (one entry per member) of extra rectangle seeds.
    The verdict compares log-log slopes against ``|V|`` with ``growth_tol``:
    ``consistent`` when neither the density ratio nor the rectangle ratio
    drifts; ``undefined-dimension evidence`` when the density ratio is stable
    but rectangle ratios grow; ``inconsistent`` otherwise.
    """
    if len(family) < 3:
        raise FamilyTooSmall("need at least three family members")
    sups = [_as_support(J) for J in family]
    nv = [s.n_vertices for s in sups]
    nj = [s.size for s in sups]
    a_hat, c, res = fit_alpha(nv, nj)
    a = a_hat if alpha is None else float(alpha)
    rows = []
    for i, s in enumerate(sups):
        extra = starts[i] if starts is not None else None
        rr = rect_ratio_sup(s, a, mode, extra, seed, exact_limit=exact_limit)
        rows.append(CombDimRow(s.n_vertices, s.size, s.size / s.n_vertices**a, rr.value, rr.exact))
    logv = np.log(np.asarray(nv, dtype=float))
    dens_slope = float(np.polyfit(logv, np.log([r.density_ratio for r in rows]), 1)[0])
    rect_slope = float(np.polyfit(logv, np.log([r.rect_ratio for r in rows]), 1)[0])
    if abs(dens_slope) <= growth_tol and rect_slope <= growth_tol:
        verdict = "consistent"
    elif dens_slope >= -growth_tol and rect_slope > growth_tol:
        verdict = "undefined-dimension evidence"
    else:
        verdict = "inconsistent"
    return CombDimReport(a_hat, c, tuple(float(r) for r in res), a, tuple(rows), dens_slope, rect_slope, verdict)


# degrees ------------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeCheck:
    max_degree: int
    threshold: float
    ok: bool


def max_degree_check(g: Graph | Support, alpha: float, epsilon: float, n: int | None = None) -> DegreeCheck:
    """Compare the maximum degree with ``n^(alpha/2 - epsilon)``."""
    if not 1 < alpha < 2:
        raise InvalidAlpha(f"alpha must lie in (1, 2), got {alpha}")
    if not 0 < epsilon < min(alpha / 2, 1 - alpha / 2):
        raise InvalidEpsilon(
            f"epsilon must lie in (0, {min(alpha / 2, 1 - alpha / 2)}), got {epsilon}"
        )
    if isinstance(g, Graph):
        deg = g.degrees
        n = n or g.n_vertices
    else:
        deg = g.degrees()
        n = n or g.n_vertices
    thr = float(n) ** (alpha / 2 - epsilon)
    dmax = int(deg.max()) if deg.size else 0
    return DegreeCheck(dmax, thr, dmax <= thr)

"""Homogeneous sums ``Z = sum q(v_1..v_d) X_{v_1} ... X_{v_d}`` and CLT diagnostics.

The sum runs over ordered, non-diagonal ``d``-tuples with a symmetric
coefficient ``q``. A :class:`HomogeneousSum` stores one row per unordered
support (the sorted tuple) together with its coefficient; every quantity that
needs the ordered picture expands each row into its ``d!`` orderings.

Conventions used throughout:

* ``norm_sq(z)`` is ``sum over ordered tuples of q^2``;
* ``variance(z) = d! * norm_sq(z)`` is ``E[Z^2]`` for standardized inputs;
* the normalized sum is ``Z / sqrt(variance(z))`` and the normalized kernel is
  ``q / sqrt(variance(z))``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import erfc

from . import spectra
from .errors import (
    CapExceeded,
    DiagonalSupport,
    DuplicateEdge,
    InvalidDistribution,
    LabelOutOfRange,
    MemoryLimit,
    NonSymmetricCoefficients,
    WrongOrder,
)
from .rng import chunk_generator, thread_count

CONTRACTION_CAP = 10_000_000
WICK_CAP = 10_000_000
SAMPLE_CHUNK = 4096
DISTRIBUTIONS = ("gaussian", "rademacher", "uniform", "centered_exponential")


@dataclass(frozen=True, eq=False)
class HomogeneousSum:
    d: int
    n_vertices: int
    keys: np.ndarray
    coefs: np.ndarray
    labels: tuple | None = None

    @property
    def n_terms(self) -> int:
        return int(self.keys.shape[0])

    @cached_property
    def ordered(self) -> tuple[np.ndarray, np.ndarray]:
        """All ``d!`` orderings of every support, with their coefficients."""
        perms = np.array(list(permutations(range(self.d))), dtype=np.int64)
        tuples = self.keys[:, perms].reshape(-1, self.d)
        values = np.repeat(self.coefs, perms.shape[0])
        return tuples, values

    @cached_property
    def coefficient_matrix(self) -> sp.csr_matrix:
        """Symmetric ``A_q`` with ``Z = X^T A_q X`` (order 2 only)."""
        if self.d != 2:
            raise WrongOrder(f"coefficient matrix needs d = 2, got d = {self.d}")
        u, v = self.keys[:, 0], self.keys[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.concatenate([self.coefs, self.coefs])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n_vertices,) * 2)

    def __repr__(self) -> str:
        return f"HomogeneousSum(d={self.d}, n_vertices={self.n_vertices}, n_terms={self.n_terms})"


def _finish(d: int, n: int, keys: np.ndarray, coefs: np.ndarray, labels) -> HomogeneousSum:
    if d < 2:
        raise WrongOrder(f"order must be at least 2, got {d}")
    keys = np.asarray(keys, dtype=np.int64).reshape(-1, d)
    coefs = np.asarray(coefs, dtype=float)
    if keys.size and (keys.min() < 0 or keys.max() >= n):
        raise LabelOutOfRange(f"vertex labels must lie in [0, {n})")
    keys = np.sort(keys, axis=1)
    if keys.size and np.any(keys[:, 1:] == keys[:, :-1]):
        raise DiagonalSupport("a support tuple repeats a vertex")
    nonzero = coefs != 0
    keys, coefs = keys[nonzero], coefs[nonzero]
    order = np.lexsort(keys.T[::-1])
    keys, coefs = keys[order], coefs[order]
    same = np.all(keys[1:] == keys[:-1], axis=1) if keys.shape[0] > 1 else np.zeros(0, bool)
    if same.any():
        i = int(np.flatnonzero(same)[0])
        if coefs[i] != coefs[i + 1]:
            raise NonSymmetricCoefficients(f"support {tuple(keys[i])} has two coefficients")
        raise DuplicateEdge(f"support {tuple(keys[i])} listed twice")
    if labels is not None:
        if len(labels) != n:
            raise LabelOutOfRange("labels must have one entry per vertex")
        labels = tuple(labels)
    return HomogeneousSum(d, int(n), keys, coefs, labels)


def build_homsum(
    d: int,
    n: int,
    terms: Mapping[Sequence[int], float] | Iterable[tuple[Sequence[int], float]],
    labels: Sequence | None = None,
) -> HomogeneousSum:
    """Build from unordered supports: each ``(verts, q)`` stands for all orderings."""
    items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
    if any(len(v) != d for v, _ in items):
        raise WrongOrder(f"every support must have {d} vertices")
    keys = np.array([list(v) for v, _ in items], dtype=np.int64).reshape(-1, d)
    coefs = np.array([q for _, q in items], dtype=float)
    return _finish(d, n, keys, coefs, labels)


def from_ordered(
    d: int, n: int, mapping: Mapping[Sequence[int], float], labels: Sequence | None = None
) -> HomogeneousSum:
    """Build from a map on ordered tuples, checking that it is symmetric."""
    ordered = {tuple(int(x) for x in k): float(q) for k, q in mapping.items() if q != 0}
    terms = {}
    for k, q in ordered.items():
        if len(k) != d:
            raise WrongOrder(f"every tuple must have {d} entries")
        if len(set(k)) != d:
            raise DiagonalSupport(f"tuple {k} repeats a vertex")
        for p in permutations(k):
            if ordered.get(p) != q:
                raise NonSymmetricCoefficients(f"coefficient of {p} differs from {k}")
        terms[tuple(sorted(k))] = q
    return build_homsum(d, n, terms, labels)


def from_graph(g, q: Sequence[float] | None = None) -> HomogeneousSum:
    """Order-2 sum over the edges of a graph (``q = 1`` unless given per edge)."""
    coefs = np.ones(g.n_edges) if q is None else np.asarray(q, dtype=float)
    return _finish(2, g.n_vertices, g.edges, coefs, g.labels)


def norm_sq(z: HomogeneousSum) -> float:
    return math.factorial(z.d) * float(np.sum(z.coefs**2))


def variance(z: HomogeneousSum) -> float:
    """``E[Z^2] = d! * sum over ordered tuples of q^2``."""
    return math.factorial(z.d) * norm_sq(z)


# contractions -----------------------------------------------------------------

def _encode(cols: np.ndarray, base: int) -> np.ndarray:
    code = np.zeros(cols.shape[0], dtype=np.int64)
    for j in range(cols.shape[1]):
        code = code * base + cols[:, j]
    return code


def contraction_norms(z: HomogeneousSum, cap: int = CONTRACTION_CAP) -> list[float]:
    """Squared norms of the self-contractions of the normalized kernel, ``r = 1..d-1``.

    Flattening the kernel into a matrix ``M`` whose rows are indexed by the
    first ``r`` coordinates, the ``r``-contraction is ``M^T M`` and its squared
    norm equals ``||M M^T||_F^2``; the cheaper of the two Gram products is
    formed. ``cap`` bounds the number of scalar products accumulated.
    """
    if z.n_terms == 0:
        raise ValueError("empty sum")
    tuples, values = z.ordered
    values = values / math.sqrt(variance(z))
    out = []
    for r in range(1, z.d):
        _, row = np.unique(_encode(tuples[:, :r], z.n_vertices), return_inverse=True)
        _, col = np.unique(_encode(tuples[:, r:], z.n_vertices), return_inverse=True)
        row_nnz = np.bincount(row).astype(np.int64)
        col_nnz = np.bincount(col).astype(np.int64)
        work_cols = int(np.sum(row_nnz**2))  # forming M^T M
        work_rows = int(np.sum(col_nnz**2))  # forming M M^T
        if min(work_cols, work_rows) > cap:
            raise MemoryLimit(
                f"contraction r={r} needs {min(work_cols, work_rows)} products (cap {cap})"
            )
        M = sp.csr_matrix((values, (row, col)), shape=(row.max() + 1, col.max() + 1))
        G = (M.T @ M) if work_cols <= work_rows else (M @ M.T)
        out.append(float(G.multiply(G).sum()))
    return out


# fourth moments ---------------------------------------------------------------

def fourth_moment_d2_exact(z: HomogeneousSum) -> float:
    """``E[Z~^4] = 3 + 12 Tr(A^4) / Tr(A^2)^2`` for Gaussian inputs (order 2).

    ``Z = X^T A X`` is a weighted sum of independent centred chi-squares; its
    cumulants are ``2^{r-1} (r-1)! Tr(A^r)``, which gives the formula.
    """
    if z.d != 2:
        raise WrongOrder(f"exact fourth moment implemented for d = 2, got d = {z.d}")
    A = z.coefficient_matrix
    if z.n_vertices <= spectra.MAX_DENSE_VERTICES:
        A = A.toarray()
        A2 = A @ A
        tr2 = float(np.sum(A * A))
        tr4 = float(np.sum(A2 * A2))
    else:
        A2 = A @ A
        tr2 = float(A.multiply(A).sum())
        tr4 = float(A2.multiply(A2).sum())
    return 3.0 + 12.0 * tr4 / tr2**2


_GAUSS_MOMENTS = np.array([1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0])


def fourth_moment_wick(z: HomogeneousSum, cap: int = WICK_CAP) -> float:
    """Exact Gaussian ``E[Z~^4]`` by brute force over quadruples of supports.

    Each quadruple contributes the product of its coefficients times
    ``prod_v E[X^{m_v}]``, where ``m_v`` counts how often ``v`` occurs; only
    even multiplicities survive. ``E[Z^2]`` is enumerated the same way, so the
    result does not lean on the variance formula.
    """
    K = z.n_terms
    if K == 0:
        raise ValueError("empty sum")
    if K**4 > cap:
        raise CapExceeded(f"{K}^4 quadruples exceed the cap {cap}")
    used, inv = np.unique(z.keys, return_inverse=True)
    P = np.zeros((K, used.size), dtype=np.int64)
    np.add.at(P, (np.repeat(np.arange(K), z.d), inv.reshape(-1)), 1)
    c = math.factorial(z.d) * z.coefs  # Z = sum over supports of c * prod X
    pair = P[:, None, :] + P[None, :, :]
    second = float(c @ np.prod(_GAUSS_MOMENTS[pair], axis=2) @ c)
    fourth = 0.0
    for a in range(K):
        for b in range(K):
            expo = P[a] + P[b] + pair
            moments = np.prod(_GAUSS_MOMENTS[expo], axis=2)
            fourth += c[a] * c[b] * float(c @ moments @ c)
    return fourth / second**2


# spectral criteria ------------------------------------------------------------

@dataclass(frozen=True)
class SpectralCriteria:
    max_eig_ratio: float
    max_degree_ratio: float
    chi_square_weights: np.ndarray


def spectral_criteria_d2(z: HomogeneousSum) -> SpectralCriteria:
    """Order-2 CLT diagnostics from the eigenvalues ``gamma`` of ``A_q``.

    ``max_eig_ratio = max|gamma| / sqrt(sum gamma^2)``; ``max_degree_ratio`` is
    the largest absolute row sum of ``A_q`` over ``sqrt(sum A_q^2)``. The
    normalized sum equals ``sum_j w_j (Y_j^2 - 1)`` in law with i.i.d. standard
    Gaussian ``Y_j`` and the returned weights ``w_j = gamma_j / sqrt(2 sum
    gamma^2)``, sorted by decreasing ``|w_j|``.
    """
    if z.d != 2:
        raise WrongOrder(f"spectral criteria need d = 2, got d = {z.d}")
    A = z.coefficient_matrix
    gam = spectra.eigh(A.toarray())
    total = float(np.sum(gam**2))
    abs_rows = np.asarray(abs(A).sum(axis=1)).ravel()
    weights = gam / math.sqrt(2.0 * total)
    weights = weights[np.argsort(-np.abs(weights), kind="stable")]
    return SpectralCriteria(
        float(np.max(np.abs(gam)) / math.sqrt(total)),
        float(abs_rows.max() / math.sqrt(total)),
        weights,
    )


# sampling ---------------------------------------------------------------------

def _draw(rng: np.random.Generator, dist: str, shape) -> np.ndarray:
    if dist == "gaussian":
        return rng.standard_normal(shape)
    if dist == "rademacher":
        return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    if dist == "uniform":
        s = math.sqrt(3.0)
        return rng.uniform(-s, s, size=shape)
    if dist == "centered_exponential":
        return rng.standard_exponential(shape) - 1.0
    raise InvalidDistribution(f"unknown distribution {dist!r}; choose from {DISTRIBUTIONS}")


def _sample_chunk(z: HomogeneousSum, dist: str, size: int, seed: int, chunk: int) -> np.ndarray:
    rng = chunk_generator(seed, chunk)
    X = _draw(rng, dist, (size, z.n_vertices))
    if z.d == 2:
        AX = z.coefficient_matrix @ X.T
        return np.einsum("ij,ij->j", X.T, AX)
    c = math.factorial(z.d) * z.coefs
    out = np.zeros(size)
    step = max(1, 2_000_000 // size)
    for s in range(0, z.n_terms, step):
        keys = z.keys[s:s + step]
        prod = X[:, keys[:, 0]]
        for j in range(1, z.d):
            prod = prod * X[:, keys[:, j]]
        out += prod @ c[s:s + step]
    return out


def sample(
    z: HomogeneousSum,
    dist: str = "gaussian",
    n_samples: int = 10_000,
    seed: int = 0,
    workers: int | None = None,
) -> np.ndarray:
    """I.i.d. draws of the normalized sum with standardized inputs.

    Samples are produced in chunks of 4096; chunk ``i`` uses the generator for
    ``seed`` advanced by ``i`` jumps, so the output depends only on
    ``(z, dist, n_samples, seed)``.
    """
    if dist not in DISTRIBUTIONS:
        raise InvalidDistribution(f"unknown distribution {dist!r}; choose from {DISTRIBUTIONS}")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    scale = 1.0 / math.sqrt(variance(z))
    sizes = [min(SAMPLE_CHUNK, n_samples - s) for s in range(0, n_samples, SAMPLE_CHUNK)]
    workers = workers or thread_count()
    jobs = [(z, dist, size, seed, i) for i, size in enumerate(sizes)]
    if workers == 1 or len(jobs) == 1:
        parts = [_sample_chunk(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _sample_chunk(*job), jobs))
    return np.concatenate(parts) * scale


def normal_cdf(x: np.ndarray) -> np.ndarray:
    return 0.5 * erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))


def ks_statistic(samples: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and ``N(0, 1)``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    F = normal_cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


@dataclass(frozen=True)
class MomentEstimate:
    order: int
    value: float
    stderr: float


def empirical_moments(samples: np.ndarray, up_to: int = 4) -> list[MomentEstimate]:
    """Raw moments ``E[X^p]`` for ``p = 1..up_to`` with standard errors."""
    x = np.asarray(samples, dtype=float)
    out = []
    for p in range(1, up_to + 1):
        xp = x**p
        out.append(MomentEstimate(p, float(xp.mean()), float(xp.std(ddof=1) / math.sqrt(x.size))))
    return out


# report -----------------------------------------------------------------------

@dataclass(frozen=True)
class CLTThresholds:
    contraction: float = 1e-2
    fourth_moment: float = 0.1
    eig_ratio: float = 0.2
    degree_ratio: float = 0.2


@dataclass(frozen=True)
class CLTReport:
    variance: float
    normalized_fourth_moment: float | None
    fourth_moment_stderr: float | None
    fourth_moment_method: str
    contraction_norms: list[float] | None
    max_abs_eigenvalue_ratio: float | None
    max_degree_ratio: float | None
    chi_square_weights: np.ndarray | None
    ks_statistic: float | None
    criteria_flags: dict = field(default_factory=dict)
    mc_fourth_moment: float | None = None
    mc_fourth_moment_stderr: float | None = None

    def to_dict(self, max_weights: int = 20) -> dict:
        w = self.chi_square_weights
        return {
            "variance": self.variance,
            "normalized_fourth_moment": self.normalized_fourth_moment,
            "fourth_moment_stderr": self.fourth_moment_stderr,
            "fourth_moment_method": self.fourth_moment_method,
            "contraction_norms": self.contraction_norms,
            "max_abs_eigenvalue_ratio": self.max_abs_eigenvalue_ratio,
            "max_degree_ratio": self.max_degree_ratio,
            "chi_square_weights": None if w is None else [float(x) for x in w[:max_weights]],
            "ks_statistic": self.ks_statistic,
            "mc_fourth_moment": self.mc_fourth_moment,
            "mc_fourth_moment_stderr": self.mc_fourth_moment_stderr,
            "criteria_flags": self.criteria_flags,
        }


def clt_report(
    z: HomogeneousSum,
    samples: int = 0,
    seed: int = 0,
    dist: str = "gaussian",
    thresholds: CLTThresholds = CLTThresholds(),
) -> CLTReport:
    """Collect every available CLT diagnostic for ``z``.

    The fourth moment is exact for order 2, exact by enumeration for tiny sums
    of higher order, and otherwise estimated by Monte Carlo when ``samples > 0``.
    Flags compare each statistic with a finite-size reporting threshold; they
    are evidence about one member, not statements about a limit.
    """
    flags: dict[str, bool] = {}
    m4 = m4_err = ks = mc = mc_err = None
    method = "none"
    if z.d == 2 and dist == "gaussian":
        m4, method = fourth_moment_d2_exact(z), "exact"
    elif z.n_terms**4 <= 1_000_000 and dist == "gaussian":
        m4, method = fourth_moment_wick(z), "wick"
    draws = None
    if samples > 0:
        draws = sample(z, dist, samples, seed)
        ks = ks_statistic(draws)
        est = empirical_moments(draws, 4)[3]
        mc, mc_err = est.value, est.stderr
        if m4 is None:
            m4, m4_err, method = mc, mc_err, "monte_carlo"
    if m4 is not None:
        flags["fourth_moment_near_3"] = abs(m4 - 3.0) <= thresholds.fourth_moment
    try:
        norms = contraction_norms(z)
        flags["contractions_small"] = max(norms) <= thresholds.contraction
    except MemoryLimit:
        norms = None
    eig_ratio = deg_ratio = weights = None
    if z.d == 2 and z.n_vertices <= spectra.MAX_DENSE_VERTICES:
        crit = spectral_criteria_d2(z)
        eig_ratio, deg_ratio, weights = crit.max_eig_ratio, crit.max_degree_ratio, crit.chi_square_weights
        flags["max_eig_ratio_small"] = eig_ratio <= thresholds.eig_ratio
        flags["max_degree_ratio_small"] = deg_ratio <= thresholds.degree_ratio
    return CLTReport(
        variance(z), m4, m4_err, method, norms, eig_ratio, deg_ratio, weights, ks, flags, mc, mc_err
    )

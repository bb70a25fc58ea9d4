import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from chaosgraph import (
    build_graph,
    build_homsum,
    build_hypergraph,
    homsum_to_hypergraph,
    hyper_adjacency,
    hyper_adjacency_spectrum,
    hyper_boundary,
    hyper_cheeger_check,
    hyper_edge_expansion,
    hyper_laplacian_spectrum,
    hyper_partition_bound,
    hyper_phi_k,
    hyper_volume,
    hypergraph_variance,
    normalized_laplacian_spectrum,
    rook,
    rooklike_hypergraph,
    triangle_hypergraph,
)
from chaosgraph.errors import DuplicateEdge, EmptySet, InvalidWeight, IsolatedVertex, LoopEdge

# the three four-vertex examples, 0-based
TWO_TRIPLES = [(0, 1, 2), (1, 2, 3)]
PAIR_QUAD_TRIPLE = [(0, 1), (0, 1, 2, 3), (1, 2, 3)]
TRIPLE_QUAD_TRIPLE = [(0, 1, 3), (0, 1, 2, 3), (0, 2, 3)]

ADJ_A = [[0, F(1, 2), F(1, 2), 0], [F(1, 2), 0, 1, F(1, 2)], [F(1, 2), 1, 0, F(1, 2)], [0, F(1, 2), F(1, 2), 0]]
ADJ_B = [[0, F(4, 3), F(1, 3), F(1, 3)], [F(4, 3), 0, F(5, 6), F(5, 6)],
         [F(1, 3), F(5, 6), 0, F(5, 6)], [F(1, 3), F(5, 6), F(5, 6), 0]]
ADJ_C = [[0, F(5, 6), F(5, 6), F(4, 3)], [F(5, 6), 0, F(1, 3), F(5, 6)],
         [F(5, 6), F(1, 3), 0, F(5, 6)], [F(4, 3), F(5, 6), F(5, 6), 0]]


@pytest.mark.parametrize(
    "edges, adj, deg",
    [(TWO_TRIPLES, ADJ_A, (1, 2, 2, 1)), (PAIR_QUAD_TRIPLE, ADJ_B, (2, 3, 2, 2)), (TRIPLE_QUAD_TRIPLE, ADJ_C, (3, 2, 2, 3))],
)
def test_small_adjacency_matrices(edges, adj, deg):
    h = build_hypergraph(4, edges)
    A = hyper_adjacency(h)
    assert np.max(np.abs(A - np.array(adj, dtype=float))) <= 1e-12
    assert h.degrees.tolist() == list(deg)
    # adjacency row sums reproduce the degrees
    assert np.allclose(A.sum(axis=1), deg)


@pytest.mark.parametrize(
    "edges, phi_s, phi_sbar",
    [(TWO_TRIPLES, F(2, 3), F(2, 3)), (PAIR_QUAD_TRIPLE, F(2, 5), F(1, 2)), (TRIPLE_QUAD_TRIPLE, F(3, 5), F(3, 5))],
)
def test_small_expansions(edges, phi_s, phi_sbar):
    h = build_hypergraph(4, edges)
    assert hyper_edge_expansion(h, {0, 1}) == pytest.approx(float(phi_s), abs=1e-15)
    assert hyper_edge_expansion(h, {2, 3}) == pytest.approx(float(phi_sbar), abs=1e-15)
    assert hyper_edge_expansion(h, range(4)) == 0.0


def test_boundary_and_volume():
    h = build_hypergraph(4, PAIR_QUAD_TRIPLE)
    assert hyper_boundary(h, {0, 1}) == [1, 2]
    assert hyper_volume(h, {0, 1}) == 5
    with pytest.raises(EmptySet):
        hyper_volume(h, [])


def test_two_uniform_reduces_to_graph():
    edges = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]
    h = build_hypergraph(4, edges)
    g = build_graph(4, edges)
    assert np.array_equal(hyper_adjacency(h), g.adjacency())
    assert np.allclose(hyper_laplacian_spectrum(h).eigenvalues, normalized_laplacian_spectrum(g).eigenvalues)
    assert h.cheeger_factor == 2.0


@pytest.mark.parametrize(
    "edges, weights, exc",
    [
        ([(0,)], None, LoopEdge),
        ([(0, 0, 1)], None, LoopEdge),
        ([(0, 1, 2), (2, 1, 0)], None, DuplicateEdge),
        ([(0, 1, 2)], [0.0], InvalidWeight),
        ([(0, 1)], None, IsolatedVertex),
    ],
)
def test_validation(edges, weights, exc):
    with pytest.raises(exc):
        build_hypergraph(3, edges, weights)


@pytest.mark.parametrize("n", [6, 8])
def test_triangle_hypergraph_spectra(n):
    h = homsum_to_hypergraph(triangle_hypergraph(n))
    adj = hyper_adjacency_spectrum(h)
    lap = hyper_laplacian_spectrum(h)
    mults = [n - 1, n * (n - 1) // 2, (n - 1) * (n - 2) // 2 - 1]
    want_adj = {4 * (n - 2): 1, 2 * n - 8: mults[0], 0: mults[1], -4: mults[2]}
    for v, m in want_adj.items():
        assert adj.multiplicity(v) == m
    want_lap = {0: 1, n / (2 * (n - 2)): mults[0], 1: mults[1], (n - 1) / (n - 2): mults[2]}
    for v, m in want_lap.items():
        assert lap.multiplicity(v) == m


def test_rooklike_matches_rook():
    z = rooklike_hypergraph(6, 3)
    h = homsum_to_hypergraph(z)
    assert np.allclose(h.weights, 0.5)
    assert np.allclose(hyper_adjacency(h), rook(6, 2).adjacency())
    lap = hyper_laplacian_spectrum(h)
    assert [(round(v, 8), m) for v, m in lap.groups] == [(0.0, 1), (0.6, 10), (1.2, 25)]


def test_variance_from_weights():
    z = build_homsum(2, 3, [((0, 1), 1.0), ((1, 2), 1.0), ((0, 2), -1.0)])
    h = homsum_to_hypergraph(z)
    assert np.allclose(h.weights, 1.0)
    assert hypergraph_variance(h, 2) == 12.0


def test_two_triples_cheeger():
    h = build_hypergraph(4, TWO_TRIPLES)
    assert h.cheeger_factor == 4.0
    rep = hyper_cheeger_check(h, 3)
    assert rep.ok
    assert rep.rows[0].phi_k == pytest.approx(oracles.phi_k(4, TWO_TRIPLES, 2))


@st.composite
def uniform3(draw, max_n=8):
    n = draw(st.integers(4, max_n))
    triples = list(itertools.combinations(range(n), 3))
    edges = set(draw(st.lists(st.sampled_from(triples), min_size=1, max_size=12)))
    for v in range(n):
        if not any(v in e for e in edges):
            edges.add(tuple(sorted({v, (v + 1) % n, (v + 2) % n})))
    weights = draw(st.lists(st.floats(0.2, 2.0), min_size=len(edges), max_size=len(edges)))
    return build_hypergraph(n, sorted(edges), weights)


@given(uniform3())
def test_hyper_cheeger_property(h):
    rep = hyper_cheeger_check(h, 3, "exact")
    for row in rep.rows:
        assert row.mu_k <= h.cheeger_factor * row.phi_k + 1e-9


@given(uniform3(max_n=7))
def test_exact_phi_matches_oracle(h):
    want = oracles.phi_k(h.n_vertices, list(h.edges), 2, list(h.weights))
    assert hyper_phi_k(h, 2, "exact").value == pytest.approx(want, abs=1e-12)


@given(uniform3(), st.data())
def test_hyper_partition_bound_property(h, data):
    n = h.n_vertices
    labels = data.draw(st.lists(st.integers(-1, 3), min_size=n, max_size=n))
    blocks = [b for b in ([v for v in range(n) if labels[v] == j] for j in range(4)) if b]
    for k in range(1, len(blocks) + 1):
        assert hyper_partition_bound(h, blocks, k).ok


@given(uniform3(max_n=7))
def test_laplacian_matches_oracle(h):
    A = oracles.hyper_adjacency(h.n_vertices, h.edges, h.weights)
    assert np.allclose(hyper_adjacency(h), A)
    d = oracles.degrees(h.n_vertices, h.edges, h.weights)
    assert np.allclose(hyper_laplacian_spectrum(h).eigenvalues, oracles.laplacian_eigs(A, d), atol=1e-10)

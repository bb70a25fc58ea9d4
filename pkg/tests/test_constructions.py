import math

import numpy as np
import pytest

from chaosgraph import (
    FractionalPartition,
    GridLayout,
    Support,
    complete_bipartite,
    enumerate_fractional_partitions,
    fractional_product,
    grid_family,
    homsum_to_hypergraph,
    hypercube,
    normalized_laplacian_spectrum,
    random_support,
    rook,
    rook_variant,
    rook_variant_directed,
    rooklike_hypergraph,
    triangle_hypergraph,
    union_with_isolated,
    variance,
)
from chaosgraph.errors import (
    BlockSizeError,
    DisconnectedPartition,
    InvalidAlpha,
    InvalidK,
    InvalidM,
    IsolatedVertex,
    LayoutSizeMismatch,
    RowCollision,
    ValidationError,
)

CYCLIC_32 = [[(1, 2), (2, 2)], [(2, 1), (3, 1)], [(3, 2), (1, 1)]]
SPLIT_42 = [[(1, 1), (2, 1)], [(1, 2), (2, 2)], [(3, 1), (4, 1)], [(3, 2), (4, 2)]]
CYCLIC_42 = [[(1, 2), (2, 2)], [(2, 1), (3, 1)], [(3, 2), (4, 2)], [(1, 1), (4, 1)]]


def vertex(n, a, b):
    return (a - 1) * n + b - 1


class TestClassicFamilies:
    def test_hypercube(self):
        g = hypercube(3)
        assert (g.n_vertices, g.n_edges) == (8, 12)
        assert set(g.degrees.tolist()) == {3}

    def test_hypercube_first_coordinate_is_high_bit(self):
        g = hypercube(3)
        assert (0, 4) in g.edge_set() and (0, 1) in g.edge_set()

    def test_rook(self):
        g = rook(6, 2)
        assert (g.n_vertices, g.n_edges) == (36, 180)
        assert set(g.degrees.tolist()) == {10}

    def test_complete_bipartite(self):
        g = complete_bipartite(3)
        assert (g.n_vertices, g.n_edges) == (6, 9)


class TestRookVariant:
    def test_no_vertical_edges(self):
        g = rook_variant(4, 0)
        assert g.n_components == 4
        mu = normalized_laplacian_spectrum(g).eigenvalues
        assert np.allclose(mu[:4], 0)

    def test_full_is_rook(self):
        assert rook_variant(5, 5).edge_set() == rook(5, 2).edge_set()

    def test_directed_neighbourhood_of_2_1(self):
        out = sorted(v for u, v in rook_variant_directed(5, 4) if u == vertex(5, 2, 1))
        row = [vertex(5, 2, b) for b in range(2, 6)]
        column = [vertex(5, i, 1) for i in (1, 3, 4)]
        assert out == sorted(row + column)

    def test_symmetrized_neighbourhood_adds_reverse_pairs(self):
        g = rook_variant(5, 4)
        v = vertex(5, 2, 1)
        nbrs = {b for a, b in g.edge_set() if a == v} | {a for a, b in g.edge_set() if b == v}
        assert len(nbrs) == 8
        assert vertex(5, 5, 1) in nbrs

    def test_symmetrized_contains_directed_pairs(self):
        directed = rook_variant_directed(6, 3)
        edges = rook_variant(6, 3).edge_set()
        assert {tuple(sorted(p)) for p in directed} == edges

    def test_invalid(self):
        with pytest.raises(InvalidK):
            rook_variant(4, 5)
        with pytest.raises(ValidationError):
            rook_variant(4, 2, symmetrize=False)

    def test_labels(self):
        assert rook_variant(3, 1).labels[4] == (2, 2)


class TestGrid:
    def test_full_beta_is_rook(self):
        assert grid_family(GridLayout.contiguous(6, 1.0)).edge_set() == rook(6, 2).edge_set()

    def test_edge_count(self):
        g = grid_family(GridLayout.contiguous(10, 0.9))
        # 2 n C(floor(beta n), 2) unordered pairs
        assert g.n_edges == 2 * 10 * math.comb(9, 2) == 720
        # only (10, 10) lies in no line set
        assert g.n_vertices == 99

    def test_random_layout(self):
        lay = GridLayout.random(12, 0.75, seed=4)
        assert lay == GridLayout.random(12, 0.75, seed=4)
        assert all(len(s) == 9 for s in lay.vertical + lay.horizontal)
        assert grid_family(lay).n_edges == 2 * 12 * math.comb(9, 2)

    def test_layout_validation(self):
        with pytest.raises(LayoutSizeMismatch):
            GridLayout(3, 1.0, (frozenset({1, 2}),) * 3, (frozenset({1, 2, 3}),) * 3)
        with pytest.raises(LayoutSizeMismatch):
            GridLayout.contiguous(3, 1.5)


class TestUnionWithIsolated:
    def test_spectrum(self):
        g = union_with_isolated(6, 4)
        assert g.n_vertices == 32
        groups = [(round(v, 8), m) for v, m in normalized_laplacian_spectrum(g).groups]
        # zero multiplicity 1 + 2(n - m); the remaining vertices carry 4/3
        assert groups == [(0.0, 5), (round(2 / 3, 8), 6), (round(4 / 3, 8), 21)]

    def test_full_is_rook(self):
        assert union_with_isolated(5, 5).edge_set() == rook(5, 2).edge_set()

    def test_equals_contiguous_grid(self):
        assert union_with_isolated(8, 6).edge_set() == grid_family(GridLayout.contiguous(8, 0.75)).edge_set()

    def test_degenerate(self):
        with pytest.raises(IsolatedVertex):
            union_with_isolated(6, 1)
        with pytest.raises(InvalidM):
            union_with_isolated(6, 7)


class TestFractional:
    def test_connectivity_of_partitions(self):
        assert FractionalPartition.of(3, 2, CYCLIC_32).is_connected()
        assert FractionalPartition.of(4, 2, CYCLIC_42).is_connected()
        with pytest.raises(DisconnectedPartition):
            FractionalPartition.of(4, 2, SPLIT_42)

    def test_invalid_partitions(self):
        with pytest.raises(RowCollision):
            FractionalPartition.of(3, 2, [[(1, 1), (1, 2)], [(2, 1), (3, 1)], [(2, 2), (3, 2)]])
        with pytest.raises(BlockSizeError):
            FractionalPartition.of(3, 3, CYCLIC_32)
        with pytest.raises(BlockSizeError):
            FractionalPartition.of(3, 2, CYCLIC_32[:2])

    def test_enumeration(self):
        assert len(enumerate_fractional_partitions(3, 2)) == 8
        # four classes once the two columns may be swapped
        assert len(enumerate_fractional_partitions(3, 2, up_to_columns=True)) == 4

    def test_single_partition_support(self):
        z = fractional_product(5, FractionalPartition.of(3, 2, CYCLIC_32))
        assert z.n_vertices == 20
        assert z.n_terms == 5 * 4 * 3
        assert z.labels[0] == (1, 2)

    def test_union_of_partitions_is_triangle_support(self):
        for n in (4, 5, 6):
            z = fractional_product(n, enumerate_fractional_partitions(3, 2))
            t = triangle_hypergraph(n)
            assert np.array_equal(z.keys, t.keys)
            assert 6 * z.n_terms == 8 * n * (n - 1) * (n - 2)

    def test_mixed_shapes_rejected(self):
        with pytest.raises(BlockSizeError):
            fractional_product(5, [FractionalPartition.of(3, 2, CYCLIC_32), FractionalPartition.of(4, 2, CYCLIC_42)])


class TestHypergraphFamilies:
    def test_triangle(self):
        z = triangle_hypergraph(6)
        assert z.n_vertices == 30
        assert 6 * z.n_terms == 960
        assert variance(z) == 5760
        h = homsum_to_hypergraph(z)
        assert set(h.degrees.tolist()) == {16}

    def test_rooklike(self):
        z = rooklike_hypergraph(6, 3)
        assert z.n_terms == 2 * 6 * math.comb(6, 3) == 240
        assert np.allclose(z.coefs**2, 0.5)


class TestRandomSupport:
    def test_deterministic(self):
        a = random_support(50, 1.5, 2, seed=9)
        b = random_support(50, 1.5, 2, seed=9)
        assert np.array_equal(a.tuples, b.tuples)

    def test_symmetric_edge_count(self):
        n, alpha = 200, 1.5
        s = random_support(n, alpha, 2, seed=0)
        assert s.is_symmetric
        edges = s.size // 2
        p = n ** (alpha - 2)
        N = math.comb(n, 2)
        assert abs(edges - N * p) <= 4 * math.sqrt(N * p * (1 - p))

    def test_order_three(self):
        s = random_support(20, 2.0, 3, seed=1)
        assert isinstance(s, Support) and s.d == 3
        assert abs(s.size - 20**2) <= 4 * math.sqrt(20**2)

    def test_alpha_range(self):
        with pytest.raises(InvalidAlpha):
            random_support(10, 2.0, 2, seed=0)

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from chaosgraph import (
    build_homsum,
    clt_report,
    complete,
    complete_bipartite,
    contraction_norms,
    empirical_moments,
    fourth_moment_d2_exact,
    fourth_moment_wick,
    from_graph,
    from_ordered,
    ks_statistic,
    rook,
    sample,
    spectral_criteria_d2,
    variance,
)
from chaosgraph.homsum import norm_sq, normal_cdf
from chaosgraph.errors import (
    CapExceeded,
    DiagonalSupport,
    DuplicateEdge,
    InvalidDistribution,
    LabelOutOfRange,
    MemoryLimit,
    NonSymmetricCoefficients,
    WrongOrder,
)


def disjoint_blocks(n, d=2):
    """``n`` disjoint single-support blocks ``{d i, ..., d i + d - 1}``."""
    return build_homsum(d, d * n, [(tuple(range(d * i, d * i + d)), 1.0) for i in range(n)])


@st.composite
def sums(draw, d=2, max_n=7, max_terms=8):
    n = draw(st.integers(d, max_n))
    keys = list(itertools.combinations(range(n), d))
    chosen = draw(st.lists(st.sampled_from(keys), min_size=1, max_size=max_terms, unique=True))
    coefs = draw(st.lists(
        st.floats(-2, 2).filter(lambda x: abs(x) > 0.05), min_size=len(chosen), max_size=len(chosen)
    ))
    return build_homsum(d, n, list(zip(chosen, coefs)))


class TestConstruction:
    def test_canonical_keys(self):
        z = build_homsum(2, 3, [((2, 0), 1.0), ((1, 0), 2.0)])
        assert z.keys.tolist() == [[0, 1], [0, 2]]
        assert z.coefs.tolist() == [2.0, 1.0]

    def test_zero_terms_dropped(self):
        assert build_homsum(2, 3, [((0, 1), 0.0), ((1, 2), 1.0)]).n_terms == 1

    @pytest.mark.parametrize(
        "terms, exc",
        [
            ([((0, 0), 1.0)], DiagonalSupport),
            ([((0, 1), 1.0), ((1, 0), 2.0)], NonSymmetricCoefficients),
            ([((0, 1), 1.0), ((1, 0), 1.0)], DuplicateEdge),
            ([((0, 5), 1.0)], LabelOutOfRange),
            ([((0, 1, 2), 1.0)], WrongOrder),
        ],
    )
    def test_invalid(self, terms, exc):
        with pytest.raises(exc):
            build_homsum(2, 3, terms)

    def test_from_ordered_checks_symmetry(self):
        z = from_ordered(2, 3, {(0, 1): 1.0, (1, 0): 1.0})
        assert z.n_terms == 1
        with pytest.raises(NonSymmetricCoefficients):
            from_ordered(2, 3, {(0, 1): 1.0})

    def test_ordered_tuples(self):
        z = build_homsum(3, 3, [((0, 1, 2), 2.0)])
        tuples, values = z.ordered
        assert len({tuple(t) for t in tuples.tolist()}) == 6
        assert np.all(values == 2.0)


class TestVariance:
    def test_triangle(self):
        z = from_graph(complete(3))
        assert norm_sq(z) == 6.0
        assert variance(z) == 12.0

    @given(sums(d=3, max_n=6))
    def test_variance_is_d_factorial_times_ordered_mass(self, z):
        q = np.zeros((z.n_vertices,) * 3)
        for key, c in zip(z.keys.tolist(), z.coefs):
            for p in itertools.permutations(key):
                q[p] = c
        assert variance(z) == pytest.approx(6 * np.sum(q * q))

    def test_sampled_variance_near_one(self):
        x = sample(from_graph(rook(5, 2)), "gaussian", 20000, seed=1)
        assert abs(x.var() - 1) < 0.05


class TestContractions:
    def test_triangle(self):
        assert contraction_norms(from_graph(complete(3))) == pytest.approx([18 / 144])

    def test_single_pair(self):
        assert contraction_norms(build_homsum(2, 2, [((0, 1), 1.0)])) == pytest.approx([1 / 8])

    def test_single_triple_against_oracle(self):
        z = build_homsum(3, 3, [((0, 1, 2), 1.0)])
        assert contraction_norms(z) == pytest.approx(oracles.contraction_sq_norms(z))
        # frozen: both contractions of one normalized triple
        assert contraction_norms(z) == pytest.approx([1 / 108, 1 / 108])

    @pytest.mark.parametrize("d", [2, 3])
    def test_disjoint_blocks_decay(self, d):
        small, big = contraction_norms(disjoint_blocks(10, d)), contraction_norms(disjoint_blocks(100, d))
        for a, b in zip(small, big):
            assert a / b == pytest.approx(10.0)
        if d == 2:
            assert small == pytest.approx([1 / 80])

    @given(sums(d=2))
    def test_order_two_matches_oracle(self, z):
        assert contraction_norms(z) == pytest.approx(oracles.contraction_sq_norms(z), rel=1e-10)

    @given(sums(d=3, max_n=6))
    def test_order_three_matches_oracle(self, z):
        assert contraction_norms(z) == pytest.approx(oracles.contraction_sq_norms(z), rel=1e-10)

    def test_cap(self):
        with pytest.raises(MemoryLimit):
            contraction_norms(from_graph(complete(30)), cap=100)


class TestFourthMoment:
    def test_single_pair(self):
        z = build_homsum(2, 2, [((0, 1), 1.0)])
        assert fourth_moment_d2_exact(z) == pytest.approx(9.0)
        assert fourth_moment_wick(z) == pytest.approx(9.0)

    def test_triangle(self):
        z = from_graph(complete(3))
        assert fourth_moment_d2_exact(z) == pytest.approx(9.0)
        assert fourth_moment_wick(z) == pytest.approx(9.0)

    def test_two_disjoint_pairs(self):
        # (Y1 + Y2)/sqrt(2) with E Y^4 = 9: (2*9 + 6)/4
        z = disjoint_blocks(2)
        assert fourth_moment_d2_exact(z) == pytest.approx(6.0)
        assert fourth_moment_wick(z) == pytest.approx(6.0)

    def test_complete_graph_chi_square_limit(self):
        assert abs(fourth_moment_d2_exact(from_graph(complete(50))) - 15) < 0.5

    @given(sums(d=2))
    def test_exact_equals_wick_and_eigen_oracle(self, z):
        exact = fourth_moment_d2_exact(z)
        assert exact == pytest.approx(fourth_moment_wick(z), abs=1e-10)
        assert exact == pytest.approx(oracles.fourth_moment_from_eigs(z), abs=1e-10)

    def test_wick_order_three_single_term(self):
        # product of three independent Gaussians: E X^4 = 3^3
        z = build_homsum(3, 3, [((0, 1, 2), 1.0)])
        assert fourth_moment_wick(z) == pytest.approx(27.0)

    def test_wrong_order(self):
        with pytest.raises(WrongOrder):
            fourth_moment_d2_exact(build_homsum(3, 3, [((0, 1, 2), 1.0)]))

    def test_wick_cap(self):
        with pytest.raises(CapExceeded):
            fourth_moment_wick(from_graph(complete(12)), cap=1000)


class TestSpectralCriteria:
    def test_complete(self):
        crit = spectral_criteria_d2(from_graph(complete(20)))
        assert crit.max_eig_ratio == pytest.approx(19 / math.sqrt(20 * 19))

    def test_rook(self):
        q = 10
        crit = spectral_criteria_d2(from_graph(rook(q, 2)))
        assert crit.max_eig_ratio == pytest.approx(2 * (q - 1) / math.sqrt(2 * q * q * (q - 1)))

    def test_bipartite_two_dominant_weights(self):
        crit = spectral_criteria_d2(from_graph(complete_bipartite(10)))
        w = crit.chi_square_weights
        assert abs(w[0]) == pytest.approx(abs(w[1])) == pytest.approx(0.5)
        assert crit.max_eig_ratio == pytest.approx(1 / math.sqrt(2))

    @given(sums(d=2))
    def test_weights_have_unit_variance(self, z):
        w = spectral_criteria_d2(z).chi_square_weights
        # Var(sum w (Y^2 - 1)) = 2 sum w^2
        assert 2 * np.sum(w**2) == pytest.approx(1.0)


class TestSampling:
    def test_deterministic(self):
        z = from_graph(rook(4, 2))
        a = sample(z, "rademacher", 9000, seed=5, workers=1)
        b = sample(z, "rademacher", 9000, seed=5, workers=4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, sample(z, "rademacher", 9000, seed=6))

    @pytest.mark.parametrize("dist", ["gaussian", "rademacher", "uniform", "centered_exponential"])
    def test_standardized_inputs(self, dist):
        z = build_homsum(2, 2, [((0, 1), 1.0)])
        x = sample(z, dist, 40000, seed=2)
        assert abs(x.mean()) < 0.05 and abs(x.var() - 1) < 0.08

    def test_higher_order_sampler(self):
        z = build_homsum(3, 4, [((0, 1, 2), 1.0), ((1, 2, 3), -1.0)])
        x = sample(z, "gaussian", 40000, seed=3)
        assert abs(x.var() - 1) < 0.05

    def test_rademacher_fourth_moment_matches_enumeration(self):
        z = from_graph(rook(4, 2))
        A = z.coefficient_matrix.toarray()
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=16)))
        vals = np.einsum("si,ij,sj->s", signs, A, signs) / math.sqrt(variance(z))
        exact = float(np.mean(vals**4))
        est = empirical_moments(sample(z, "rademacher", 100_000, seed=9), 4)[3]
        assert abs(est.value - exact) <= 4 * est.stderr
        # Rademacher inputs sit below the Gaussian value on this support
        assert exact < fourth_moment_d2_exact(z)

    def test_gaussian_fourth_moment_matches_exact(self):
        z = from_graph(rook(6, 2))
        est = empirical_moments(sample(z, "gaussian", 100_000, seed=4), 4)[3]
        assert abs(est.value - fourth_moment_d2_exact(z)) <= 4 * est.stderr

    def test_unknown_distribution(self):
        with pytest.raises(InvalidDistribution):
            sample(from_graph(complete(3)), "cauchy", 10, seed=0)

    def test_ks_and_cdf(self):
        assert normal_cdf(np.array([0.0]))[0] == 0.5
        rng = np.random.default_rng(0)
        assert ks_statistic(rng.standard_normal(20000)) < 0.02
        assert ks_statistic(rng.standard_normal(20000) + 1) > 0.3

    def test_moment_estimates(self):
        m = empirical_moments(np.array([1.0, -1.0, 1.0, -1.0]), 4)
        assert [e.value for e in m] == [0.0, 1.0, 0.0, 1.0]
        assert m[1].stderr == 0.0


class TestReport:
    def test_rook_report(self):
        rep = clt_report(from_graph(rook(10, 2)), samples=5000, seed=1)
        assert rep.fourth_moment_method == "exact"
        assert rep.mc_fourth_moment is not None and rep.ks_statistic is not None
        assert rep.criteria_flags["max_eig_ratio_small"] == (rep.max_abs_eigenvalue_ratio <= 0.2)
        d = rep.to_dict()
        assert d["variance"] == variance(from_graph(rook(10, 2)))

    def test_higher_order_monte_carlo(self):
        z = build_homsum(3, 5, [((0, 1, 2), 1.0), ((2, 3, 4), 1.0), ((0, 3, 4), 1.0)])
        rep = clt_report(z, samples=2000, seed=0, dist="rademacher")
        assert rep.fourth_moment_method == "monte_carlo"
        assert rep.fourth_moment_stderr > 0

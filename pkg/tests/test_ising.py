import numpy as np
import pytest

from isingreg import (InteractionMatrix, IsingModel, conditional_mean,
                      exact_summary, gibbs_sample)
from isingreg.errors import EnumerationCapError
from isingreg.ising import parse_spins, serialize_spins, sweep_distribution

from helpers import enumeration_conditional, random_model, random_spins


def two_spin_model(beta, h=(0.0, 0.0)):
    A = InteractionMatrix.from_adjacency([(0, 1)], 2)
    return IsingModel(A, np.array(h, dtype=float), beta)


class TestConditionalMean:
    def test_zero_beta_zero_field(self):
        model = two_spin_model(0.0)
        for i in range(2):
            assert conditional_mean(model, np.array([1, -1]), i) == 0.0

    def test_two_spin_closed_form(self):
        # E[s0 | s1=+1] = tanh(beta * A01) for the edge-coupled pair
        model = two_spin_model(0.25)
        got = conditional_mean(model, np.array([1, 1]), 0)
        assert got == pytest.approx(np.tanh(0.25), abs=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_enumeration_exactly(self, seed):
        rng = np.random.default_rng(seed)
        n = 6
        model = random_model(rng, n)
        summ = exact_summary(model)
        for code in range(2 ** n):
            sigma = (((code >> np.arange(n)) & 1) * 2 - 1).astype(float)
            for i in range(n):
                oracle = enumeration_conditional(summ, code, i, n)
                assert conditional_mean(model, sigma, i) == pytest.approx(
                    oracle, abs=1e-12)

    def test_index_out_of_range(self):
        model = two_spin_model(0.1)
        with pytest.raises(IndexError):
            conditional_mean(model, np.array([1, 1]), 2)


class TestExactSummary:
    def test_uniform_at_zero_parameters(self):
        model = two_spin_model(0.0)
        summ = exact_summary(model)
        np.testing.assert_allclose(summ.full_table, 0.25)
        np.testing.assert_allclose(summ.marginal_means, 0.0, atol=1e-15)
        assert summ.log_partition == pytest.approx(0.0, abs=1e-12)

    def test_two_spin_pair_correlation(self):
        # joint weight exp(beta * s0 s1) for a unit edge
        beta = 0.25
        summ = exact_summary(two_spin_model(beta))
        assert summ.pair_means[0, 1] == pytest.approx(np.tanh(beta), abs=1e-14)

    def test_negating_field_negates_marginals(self):
        rng = np.random.default_rng(11)
        model = random_model(rng, 5)
        flipped = IsingModel(model.A, -model.h, model.beta)
        m1 = exact_summary(model).marginal_means
        m2 = exact_summary(flipped).marginal_means
        np.testing.assert_allclose(m1, -m2, atol=1e-12)

    def test_table_normalization_and_symmetry(self):
        rng = np.random.default_rng(3)
        model = random_model(rng, 7)
        summ = exact_summary(model)
        assert abs(summ.full_table.sum() - 1.0) <= 1e-12
        np.testing.assert_allclose(summ.pair_means, summ.pair_means.T,
                                   atol=1e-12)
        assert np.all(np.abs(summ.marginal_means) <= 1.0)

    def test_cap_enforced(self):
        A = InteractionMatrix.curie_weiss(21)
        with pytest.raises(EnumerationCapError):
            exact_summary(IsingModel(A, np.zeros(21), 0.1))

    def test_full_size_enumeration_independent_sites(self):
        # n = 20 at the cap, beta = 0: marginals are exactly tanh(h)
        n = 20
        A = InteractionMatrix.curie_weiss(n)
        h = np.linspace(-1.2, 1.2, n)
        summ = exact_summary(IsingModel(A, h, 0.0))
        assert abs(summ.full_table.sum() - 1.0) <= 1e-12
        np.testing.assert_allclose(summ.marginal_means, np.tanh(h), atol=1e-12)
        want_pairs = np.outer(np.tanh(h), np.tanh(h))
        np.fill_diagonal(want_pairs, 1.0)
        np.testing.assert_allclose(summ.pair_means, want_pairs, atol=1e-12)


class TestGibbs:
    def test_determinism(self):
        rng = np.random.default_rng(0)
        model = random_model(rng, 8)
        s1 = gibbs_sample(model, 20, seed=123)
        s2 = gibbs_sample(model, 20, seed=123)
        np.testing.assert_array_equal(s1, s2)
        s3 = gibbs_sample(model, 20, seed=124)
        assert not np.array_equal(s1, s3)

    def test_independent_sites_at_beta_zero(self):
        n = 6
        A = InteractionMatrix.curie_weiss(n)
        h = np.linspace(-1, 1, n)
        model = IsingModel(A, h, 0.0)
        states = gibbs_sample(model, 4000, burn_in=20, thin=1, seed=9)
        emp = states.mean(axis=0)
        se = np.sqrt((1 - np.tanh(h) ** 2)) / np.sqrt(4000)
        assert np.all(np.abs(emp - np.tanh(h)) <= 3.5 * se + 1e-12)

    @pytest.mark.parametrize("seed,graph", [(1, False), (2, True)])
    def test_marginals_match_enumeration(self, seed, graph):
        rng = np.random.default_rng(seed)
        model = random_model(rng, 8, graph=graph)
        summ = exact_summary(model)
        states = gibbs_sample(model, 6000, burn_in=100, thin=3, seed=seed)
        emp = states.mean(axis=0)
        se = np.sqrt(1 - summ.marginal_means ** 2) / np.sqrt(6000)
        # thinned samples are mildly correlated; allow a small inflation
        assert np.all(np.abs(emp - summ.marginal_means) <= 4.0 * se + 0.01)

    def test_block_backend_matches_csr_backend_statistics(self):
        n = 12
        blocks = InteractionMatrix.block_partition(n, 3)
        dense = InteractionMatrix.from_dense(blocks.dense())
        h = np.linspace(-0.5, 0.5, n)
        m_b = IsingModel(blocks, h, 0.4)
        m_d = IsingModel(dense, h, 0.4)
        e_b = exact_summary(m_b).marginal_means
        e_d = exact_summary(m_d).marginal_means
        np.testing.assert_allclose(e_b, e_d, atol=1e-12)
        s_b = gibbs_sample(m_b, 3000, seed=5).mean(axis=0)
        assert np.max(np.abs(s_b - e_b)) < 0.06

    def test_argument_validation(self):
        model = two_spin_model(0.1)
        with pytest.raises(ValueError):
            gibbs_sample(model, 0)
        with pytest.raises(ValueError):
            gibbs_sample(model, 1, thin=0)


class TestSweepStationarity:
    @pytest.mark.parametrize("seed", range(4))
    def test_exact_distribution_is_invariant(self, seed):
        rng = np.random.default_rng(40 + seed)
        model = random_model(rng, 7, graph=(seed % 2 == 0))
        table = exact_summary(model).full_table
        after = sweep_distribution(model, table)
        assert np.max(np.abs(after - table)) <= 1e-10

    def test_sweep_moves_non_stationary_distribution(self):
        rng = np.random.default_rng(77)
        model = random_model(rng, 5)
        p = np.zeros(32)
        p[0] = 1.0
        after = sweep_distribution(model, p)
        assert abs(after.sum() - 1.0) <= 1e-12
        assert np.max(np.abs(after - p)) > 1e-3


class TestSpinSerialization:
    def test_roundtrip(self):
        states = np.array([[1, -1, 1], [-1, -1, 1]], dtype=np.int8)
        text = serialize_spins(states)
        assert text == "1,-1,1\n-1,-1,1\n"
        np.testing.assert_array_equal(parse_spins(text), states)

import math
from itertools import combinations

import numpy as np
import pytest
from scipy import stats

from hyperdp.hypergraph import Labeling, ValidationError, binom
from hyperdp.model import (
    ModelParams,
    derive_seed,
    edge_probability,
    sample_ground_truth,
    sample_hypergraph,
)

from oracles import all_h_subsets


def test_params_derivation_natural_log():
    params = ModelParams.from_coefficients(100, 3, 13.0, 1.0)
    assert params.p == pytest.approx(13 * math.log(100) / 4851, rel=1e-12)
    assert params.p == pytest.approx(0.012341, abs=5e-7)
    assert params.q == pytest.approx(0.00094933, abs=2e-8)


def test_params_validation():
    with pytest.raises(ValidationError):
        ModelParams.from_coefficients(10, 3, 10000.0, 1.0)  # p > 1, no clamping
    with pytest.raises(ValidationError):
        ModelParams.from_coefficients(10, 3, 1.0, 2.0)  # a < b
    with pytest.raises(ValidationError):
        ModelParams.from_coefficients(10, 3, 1.0, 0.0)  # b = 0
    with pytest.raises(ValidationError):
        ModelParams.from_coefficients(2, 3, 1.0, 1.0)  # n < h


def test_params_from_probabilities_round_trip():
    params = ModelParams.from_probabilities(8, 3, 0.3, 0.1)
    assert params.p == 0.3 and params.q == 0.1
    again = ModelParams.from_coefficients(8, 3, params.a, params.b)
    assert again.p == pytest.approx(0.3, rel=1e-12)


def test_derive_seed_stable_and_distinct():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    seen = {derive_seed(0, i, j) for i in range(50) for j in range(50)}
    assert len(seen) == 2500


def test_ground_truth_balanced_counts():
    lab = sample_ground_truth(6, "balanced", 123)
    assert sum(1 for v in lab.labels if v == 1) == 3
    with pytest.raises(ValidationError):
        sample_ground_truth(5, "balanced", 1)


def test_ground_truth_determinism():
    a = sample_ground_truth(40, "uniform_iid", 99)
    b = sample_ground_truth(40, "uniform_iid", 99)
    assert a == b
    assert a != sample_ground_truth(40, "uniform_iid", 100)


def test_ground_truth_uniform_iid_coordinate_means():
    n, draws = 10, 100_000
    total = np.zeros(n)
    for i in range(draws):
        total += sample_ground_truth(n, "uniform_iid", derive_seed(5, i)).array
    means = total / draws
    assert np.abs(means).max() < 3.0 / math.sqrt(draws)


def test_sample_hypergraph_degenerate_probs():
    sigma = Labeling.from_iterable([1, 1, 1, -1, -1, -1])
    empty = sample_hypergraph(ModelParams(6, 3, 1, 1, 0.0, 0.0), sigma, 7)
    assert empty.num_edges == 0
    full = sample_hypergraph(ModelParams(6, 3, 1, 1, 1.0, 1.0), sigma, 7)
    assert full.num_edges == binom(6, 3)


def test_sample_hypergraph_determinism():
    params = ModelParams.from_coefficients(30, 3, 6.0, 1.0)
    sigma = sample_ground_truth(30, "balanced", 1)
    assert sample_hypergraph(params, sigma, 2) == sample_hypergraph(params, sigma, 2)


def test_sample_hypergraph_expected_edge_count():
    # closed-form mean vs Monte Carlo, within 4 sigma of the mean estimator
    params = ModelParams.from_coefficients(100, 3, 13.0, 1.0)
    sigma = sample_ground_truth(100, "balanced", 0)
    n_in = 2 * binom(50, 3)
    n_cross = binom(100, 3) - n_in
    mean = n_in * params.p + n_cross * params.q
    var = n_in * params.p * (1 - params.p) + n_cross * params.q * (1 - params.q)
    trials = 600
    counts = [
        sample_hypergraph(params, sigma, derive_seed(17, i)).num_edges
        for i in range(trials)
    ]
    observed = float(np.mean(counts))
    assert abs(observed - mean) < 4.0 * math.sqrt(var / trials)


def test_class_counts_are_binomial_chi_square():
    # conditional on sigma, in/cross edge counts follow the stated binomials
    params = ModelParams.from_probabilities(8, 3, 0.3, 0.3)
    sigma = Labeling.from_iterable([1, 1, 1, 1, -1, -1, -1, -1])
    mono_set = {
        e for e in all_h_subsets(8, 3) if len({sigma.labels[v] for v in e}) == 1
    }
    n_in, n_cross = len(mono_set), binom(8, 3) - len(mono_set)
    trials = 2500
    k_in = np.zeros(trials, dtype=int)
    k_cr = np.zeros(trials, dtype=int)
    for i in range(trials):
        H = sample_hypergraph(params, sigma, derive_seed(23, i))
        edges = set(H.edge_tuples())
        k_in[i] = len(edges & mono_set)
        k_cr[i] = len(edges) - k_in[i]

    for counts, m in ((k_in, n_in), (k_cr, n_cross)):
        ks = np.arange(m + 1)
        expected = stats.binom.pmf(ks, m, 0.3) * trials
        # merge sparse bins (expected < 5) into neighbors for a valid test
        mask = expected >= 5
        obs = np.array(
            [np.sum(counts == k) for k in ks[mask]] + [np.sum(~np.isin(counts, ks[mask]))],
            dtype=float,
        )
        exp = np.append(expected[mask], trials - expected[mask].sum())
        chi2 = ((obs - exp) ** 2 / exp).sum()
        pval = stats.chi2.sf(chi2, df=len(exp) - 1)
        assert pval > 0.01
    # independence: correlation of the two counts is negligible
    assert abs(np.corrcoef(k_in, k_cr)[0, 1]) < 0.08


def test_edge_probability_values():
    params = ModelParams.from_probabilities(6, 3, 0.4, 0.1)
    sigma = Labeling.from_iterable([1, 1, 1, -1, -1, -1])
    assert edge_probability(params, sigma, (0, 1, 2)) == 0.4
    assert edge_probability(params, sigma, (0, 1, 3)) == 0.1


def test_edge_probability_matches_empirical_frequency():
    params = ModelParams.from_probabilities(6, 3, 0.35, 0.08)
    sigma = Labeling.from_iterable([1, 1, 1, -1, -1, -1])
    trials = 100_000
    counts = {e: 0 for e in all_h_subsets(6, 3)}
    for i in range(trials):
        H = sample_hypergraph(params, sigma, derive_seed(31, i))
        for e in H.edge_tuples():
            counts[e] += 1
    for e, c in counts.items():
        prob = edge_probability(params, sigma, e)
        se = math.sqrt(prob * (1 - prob) / trials)
        assert abs(c / trials - prob) < 4.0 * se

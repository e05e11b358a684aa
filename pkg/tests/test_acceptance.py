"""Acceptance gate: one test per criterion, each printing a PASS line
with its elapsed time (run with `pytest -s tests/test_acceptance.py -v`).

All tolerances are pinned here; the Monte Carlo criteria run at the
frozen master seed 20260809 with 100 trials per sweep point.
"""

import math
import time

import numpy as np
import pytest

from hyperdp.audit import (
    audit_rr_closed_form,
    audit_sampling,
    audit_stability_exhaustive,
)
from hyperdp.exhaustive import family_for
from hyperdp.experiments import (
    ExperimentConfig,
    run_experiment,
    summary_csv_text,
    trials_csv_text,
)
from hyperdp.hypergraph import Hypergraph, binom
from hyperdp.mechanisms import PrivacyBudget
from hyperdp.model import ModelParams, derive_seed, sample_ground_truth, sample_hypergraph
from hyperdp.thresholds import (
    chernoff_exponent,
    tail_bound_exponent,
    m_lower_bound,
    m_of_s,
    rr_min_a,
    rr_min_eps,
    stability_mu,
    stability_sufficient_bound,
    stability_threshold,
)

from oracles import exact_binomial_difference_tail

MASTER_SEED = 20260809
MC_TRIALS = 100
A_VALUES = tuple(float(a) for a in range(5, 31))
EPS_VALUES = (3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0)


def _report(name: str, elapsed: float, detail: str) -> None:
    print(f"\nACCEPTANCE PASS [{name}] ({elapsed:.2f}s): {detail}")


def test_criterion_threshold_anchors():
    start = time.monotonic()
    a_star = rr_min_a(b=1.0, h=3, eps=7.0, n=100)
    eps_star = rr_min_eps(a=13.0, b=1.0, h=3, n=100)
    assert abs(a_star - 10.6008) <= 5e-4
    assert eps_star.ok and abs(eps_star.value - 5.8611) <= 5e-4
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    _report(
        "threshold anchors",
        elapsed,
        f"rr_min_a={a_star:.6f} (10.6008 +/- 5e-4), rr_min_eps={eps_star.value:.6f} (5.8611 +/- 5e-4)",
    )


def test_criterion_algebraic_consistency():
    start = time.monotonic()
    rng = np.random.default_rng(101)
    worst = 0.0
    false_permits = 0
    for _ in range(10_000):
        a = float(rng.uniform(1.0, 60.0))
        b = float(rng.uniform(0.01, a))
        h = int(rng.integers(2, 6))
        eps = float(rng.uniform(0.1, 20.0))
        t = float(rng.uniform(0.1, 5.0))
        res = stability_threshold(a, b, h, eps, t)
        worst = max(worst, abs(res.auxiliaries["mu"] - res.auxiliaries["split_form"]))
        if stability_sufficient_bound(a, b, h, eps, t):
            if not stability_mu(a, b, h, eps, t) >= 2.0 ** (h - 1) - 1e-12:
                false_permits += 1
    assert worst <= 1e-12
    assert false_permits == 0
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    _report(
        "algebraic consistency",
        elapsed,
        f"two-condition vs joint-root form agree to {worst:.2e} over 1e4 points; "
        f"simplified bound never falsely permits",
    )


def test_criterion_dp_audits_exact():
    start = time.monotonic()
    # randomized response: slack exactly zero by the product closed form
    for n in (5, 6, 8):
        for eps in (0.5, 1.0, 3.0):
            assert audit_rr_closed_form(n, 3, eps).max_slack == 0.0

    # exponential mechanism over 50 sampled instances at n=6, h=3
    params6 = ModelParams.from_coefficients(6, 3, 2.0, 0.5)
    family = []
    for i in range(50):
        truth = sample_ground_truth(6, "balanced", derive_seed(MASTER_SEED, 7, i, 0))
        family.append(sample_hypergraph(params6, truth, derive_seed(MASTER_SEED, 7, i, 1)))
    expo_slacks = []
    for eps in (0.5, 1.0, 2.0):
        rep = audit_sampling("expo", family, eps, label_space="balanced")
        expo_slacks.append(rep.max_slack)
        assert rep.max_slack <= 1e-12
        assert rep.pairs_checked == 50 * binom(6, 3)

    # bayes: minimal passing eps equals the posterior-ratio bound
    p, q = 0.99, 1e-9
    params_b = ModelParams.from_probabilities(6, 3, p, q)
    bound = math.log(p * (1 - q) / (q * (1 - p)))
    G = Hypergraph.from_vertex_sets(6, 3, [(3, 4, 5)])
    rep_b = audit_sampling("bayes", [G], eps=bound, params=params_b, label_space="balanced")
    assert rep_b.max_slack <= 1e-12
    assert abs(rep_b.max_log_ratio - bound) <= 1e-9

    # stability with exact distances over the exhaustive n=5, h=3 family
    params5 = ModelParams.from_coefficients(5, 3, 0.5, 0.1)
    rep_s = audit_stability_exhaustive(
        params5, PrivacyBudget(0.5, 0.1), label_space="all"
    )
    assert rep_s.max_slack <= 1e-12
    assert rep_s.pairs_checked == 1024 * binom(5, 3)

    elapsed = time.monotonic() - start
    assert elapsed < 600.0
    _report(
        "dp audits",
        elapsed,
        f"rr slack 0 exactly; expo slack max {max(expo_slacks):.2e}; "
        f"bayes min-eps within {abs(rep_b.max_log_ratio - bound):.2e} of ln(p(1-q)/(q(1-p))); "
        f"stability exhaustive slack {rep_s.max_slack:.2e}",
    )


def test_criterion_finite_n_bound_checks():
    start = time.monotonic()
    # exact instability distance dominates the count-gap surrogate on all
    # 1024 hypergraphs at n=5, h=3
    params5 = ModelParams.from_coefficients(5, 3, 0.5, 0.1)
    fam = family_for(params5, "all")
    for mask in range(fam.num_masks):
        gap = 0 if fam.tie[mask] else fam.surrogate_gap(mask)
        assert gap >= 0
        assert fam.distance(mask) >= gap

    # split-count lower bound over the full grid
    for n in range(20, 201):
        for h in (2, 3, 4):
            for s in range(1, n // 2 + 1):
                assert m_lower_bound(n, h, s) <= m_of_s(n, h, s)

    # closed-form tail exponent vs independent numeric maximization
    rng = np.random.default_rng(55)
    worst = 0.0
    for _ in range(300):
        m = int(rng.integers(5, 500))
        n = int(rng.integers(8, 300))
        h = int(rng.integers(2, 5))
        a = float(rng.uniform(0.5, 20.0))
        b = float(rng.uniform(0.05, a))
        beta = float(rng.uniform(0.0, 5.0))
        closed, numeric = chernoff_exponent(m, n, h, a, b, beta)
        worst = max(worst, abs(closed - numeric))
    assert worst <= 1e-9

    # closed tail bound dominates the exact convolution tail (m <= 200)
    configs = [
        (12, 3, 1, 8.0, 0.5, 1.0, 5.0),
        (12, 3, 2, 8.0, 0.5, 1.0, 5.0),
        (15, 3, 1, 10.0, 0.5, 1.0, 6.0),
        (60, 2, 1, 8.0, 1.0, 1.0, 4.0),
        (80, 2, 1, 10.0, 1.0, 2.0, 6.0),
        (9, 4, 1, 3.0, 0.3, 1.0, 6.0),
        (10, 4, 1, 3.5, 0.3, 1.0, 8.0),
    ]
    for n, h, s, a, b, t, eps in configs:
        m = m_of_s(n, h, s)
        assert m <= 200
        params = ModelParams.from_coefficients(n, h, a, b)
        exact = exact_binomial_difference_tail(
            m, params.p, params.q, (t + 1) / eps * math.log(n)
        )
        exponent = tail_bound_exponent(n, h, s, a, b, eps, t)
        assert exponent > 0
        assert exact <= float(n) ** (-exponent)

    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    _report(
        "finite-n bound checks",
        elapsed,
        f"d >= surrogate on 1024/1024; split-count bound holds on full grid; "
        f"chernoff closed-numeric gap {worst:.2e}; tail bound dominates convolution",
    )


@pytest.fixture(scope="module")
def mc_sweeps():
    start = time.monotonic()
    base = dict(
        n=100, h=3, b=1.0, estimator="spectral",
        trials=MC_TRIALS, master_seed=MASTER_SEED,
    )
    _, sum_none = run_experiment(
        ExperimentConfig(mechanism="none", a_values=A_VALUES, **base), threads=2
    )
    _, sum_rr = run_experiment(
        ExperimentConfig(mechanism="rr", a_values=A_VALUES, fixed_eps=7.0, **base),
        threads=2,
    )
    _, sum_eps = run_experiment(
        ExperimentConfig(mechanism="rr", eps_values=EPS_VALUES, fixed_a=13.0, **base),
        threads=2,
    )
    return sum_none, sum_rr, sum_eps, time.monotonic() - start


def _count_inversions(means, tol):
    inversions = [(b - a) for a, b in zip(means, means[1:]) if b > a]
    return len(inversions), max(inversions, default=0.0)


def test_criterion_monte_carlo_trends(mc_sweeps):
    sum_none, sum_rr, sum_eps, elapsed = mc_sweeps
    # (i) non-private error nonincreasing in a, up to one inversion <= 0.02
    none_means = [s.mean_error for s in sum_none]
    count, largest = _count_inversions(none_means, 0.02)
    assert count <= 1 and largest <= 0.02
    # (ii) privatized error dominates the non-private error at every a
    for s_n, s_r in zip(sum_none, sum_rr):
        assert s_r.mean_error >= s_n.mean_error
    # (iii) success rate above 0.9 past the recovery threshold with slack
    for s in sum_rr:
        if s.sweep_value >= 14.0:
            assert s.success_rate >= 0.9
    # (iv) eps sweep nonincreasing with success >= 0.9 at eps >= 7
    eps_means = [s.mean_error for s in sum_eps]
    count_e, largest_e = _count_inversions(eps_means, 0.02)
    assert count_e <= 1 and largest_e <= 0.02
    for s in sum_eps:
        if s.sweep_value >= 7.0:
            assert s.success_rate >= 0.9
    assert elapsed < 1200.0
    _report(
        "monte carlo trends",
        elapsed,
        f"a-sweep inversions {count} (max {largest:.4f}); domination at all {len(sum_none)} points; "
        f"rr success >= 0.9 for a >= 14; eps-sweep monotone with success >= 0.9 at eps >= 7",
    )


def test_criterion_determinism_across_threads():
    start = time.monotonic()
    cfg = ExperimentConfig(
        n=60, h=3, b=1.0, mechanism="rr", estimator="spectral",
        trials=8, master_seed=MASTER_SEED, a_values=(8.0, 12.0), fixed_eps=7.0,
    )
    outputs = []
    for threads in (1, 4, 8):
        records, summaries = run_experiment(cfg, threads=threads)
        outputs.append((trials_csv_text(records), summary_csv_text(summaries)))
    assert outputs[0] == outputs[1] == outputs[2]
    elapsed = time.monotonic() - start
    _report(
        "determinism",
        elapsed,
        "trial and summary CSVs byte-identical at 1, 4, and 8 threads",
    )

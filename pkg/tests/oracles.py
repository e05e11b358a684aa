"""Independent oracles used by the test suite.

Everything here recomputes quantities from first principles (per-edge
enumeration, brute-force search, exact convolution) without calling the
library paths under test.
"""

from __future__ import annotations

import math
from itertools import combinations, product

import numpy as np
from scipy.stats import binom as binom_dist


def all_h_subsets(n: int, h: int) -> list[tuple[int, ...]]:
    return list(combinations(range(n), h))


def brute_cross_count(edge_tuples, labels) -> int:
    count = 0
    for e in edge_tuples:
        vals = {labels[v] for v in e}
        if len(vals) > 1:
            count += 1
    return count


def brute_loglik(edge_set: set, n: int, h: int, labels, p: float, q: float) -> float:
    """Per-subset Bernoulli product over every potential hyperedge."""
    total = 0.0
    for e in all_h_subsets(n, h):
        mono = len({labels[v] for v in e}) == 1
        prob = p if mono else q
        if tuple(e) in edge_set:
            total += math.log(prob)
        else:
            total += math.log1p(-prob)
    return total


def all_sign_vectors(n: int):
    return [tuple(v) for v in product((1, -1), repeat=n)]


def balanced_vectors(n: int):
    return [v for v in all_sign_vectors(n) if sum(v) == 0]


def brute_ml_balanced(edge_tuples, n: int) -> tuple[int, list]:
    """(min cross count, list of minimizing canonical balanced vectors)."""
    best = None
    argbest = []
    for v in balanced_vectors(n):
        if v[0] != 1:
            continue
        c = brute_cross_count(edge_tuples, v)
        if best is None or c < best:
            best, argbest = c, [v]
        elif c == best:
            argbest.append(v)
    return best, argbest


def exact_binomial_difference_tail(m: int, p: float, q: float, threshold: float) -> float:
    """P(Binom(m, p) - Binom(m, q) < threshold) by exact convolution."""
    ks = np.arange(m + 1)
    pmf_p = binom_dist.pmf(ks, m, p)
    pmf_q = binom_dist.pmf(ks, m, q)
    conv = np.convolve(pmf_p, pmf_q[::-1])  # index i <-> difference i - m
    diffs = np.arange(-m, m + 1)
    return float(conv[diffs < threshold].sum())


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-12, iters: int = 400) -> float:
    """Max of a unimodal f on [lo, hi] by golden-section search."""
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a < tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return f(x)

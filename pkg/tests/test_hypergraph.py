import json
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdp.hypergraph import (
    Hypergraph,
    Labeling,
    ValidationError,
    all_canonical_labelings,
    balanced_canonical_labelings,
    binom,
    count_cross_cluster,
    monochromatic_capacity,
    rank_subset,
    symmetric_difference_size,
    unrank_subset,
)

from oracles import all_h_subsets, brute_cross_count


def test_binom_values():
    assert binom(99, 2) == 4851  # 99*98/2
    assert binom(5, 0) == 1
    assert binom(3, 5) == 0
    # exact wide-integer arithmetic at n = 128: compare with the product formula
    num, den = 1, 1
    for i in range(64):
        num *= 128 - i
        den *= i + 1
    assert binom(128, 64) == num // den
    assert binom(128, 64) > 1 << 122  # far past 64-bit width, no silent wrap


def test_binom_rejects_negative():
    with pytest.raises(ValidationError):
        binom(-1, 2)


def test_rank_unrank_bijection_exhaustive():
    # every subset of every order up to n = 12
    for n in range(1, 13):
        for h in range(1, n + 1):
            seen = set()
            for combo in combinations(range(n), h):
                r = rank_subset(combo, n)
                assert 0 <= r < binom(n, h)
                assert unrank_subset(r, n, h) == combo
                seen.add(r)
            assert len(seen) == binom(n, h)


def test_rank_subset_order_edges():
    assert rank_subset((0, 1, 2), 6) == 0
    assert unrank_subset(binom(6, 3) - 1, 6, 3) == (3, 4, 5)


def test_rank_subset_validation():
    with pytest.raises(ValidationError):
        rank_subset((1, 0, 2), 6)
    with pytest.raises(ValidationError):
        rank_subset((0, 1, 1), 6)
    with pytest.raises(ValidationError):
        rank_subset((0, 1, 9), 6)


def test_count_cross_cluster_examples():
    H = Hypergraph.from_vertex_sets(4, 3, [(0, 1, 2), (0, 1, 3)])
    sigma = Labeling.from_iterable([1, 1, -1, -1])
    assert count_cross_cluster(H, sigma) == 2

    empty = Hypergraph(4, 3)
    assert count_cross_cluster(empty, sigma) == 0

    full = Hypergraph.from_vertex_sets(6, 3, all_h_subsets(6, 3))
    sigma6 = Labeling.from_iterable([1, 1, 1, -1, -1, -1])
    assert count_cross_cluster(full, sigma6) == 20 - 2


def test_count_cross_cluster_length_mismatch():
    H = Hypergraph(5, 3)
    with pytest.raises(ValidationError):
        count_cross_cluster(H, Labeling.from_iterable([1, -1]))


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_cross_count_matches_brute_force_and_sign_invariant(data):
    n = data.draw(st.integers(4, 7))
    h = data.draw(st.integers(2, min(4, n)))
    subsets = all_h_subsets(n, h)
    chosen = data.draw(st.sets(st.sampled_from(subsets)))
    labels = data.draw(st.lists(st.sampled_from((-1, 1)), min_size=n, max_size=n))
    H = Hypergraph.from_vertex_sets(n, h, chosen)
    sigma = Labeling.from_iterable(labels)
    expected = brute_cross_count(chosen, labels)
    assert count_cross_cluster(H, sigma) == expected
    assert count_cross_cluster(H, sigma.flipped()) == expected


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_cross_count_edge_toggle_sensitivity(data):
    # toggling one edge moves the count by the edge's cross indicator:
    # +1 when adding a cross edge, -1 when removing one, 0 for mono edges
    n, h = 6, 3
    subsets = all_h_subsets(n, h)
    chosen = data.draw(st.sets(st.sampled_from(subsets)))
    labels = data.draw(st.lists(st.sampled_from((-1, 1)), min_size=n, max_size=n))
    H = Hypergraph.from_vertex_sets(n, h, chosen)
    sigma = Labeling.from_iterable(labels)
    base = count_cross_cluster(H, sigma)
    for r in range(binom(n, h)):
        verts = unrank_subset(r, n, h)
        cross = len({labels[v] for v in verts}) > 1
        sign = -1 if r in H.edges else 1
        delta = count_cross_cluster(H.with_edge_toggled(r), sigma) - base
        assert delta == (sign if cross else 0)


def test_cross_plus_monochromatic_partition():
    rng = np.random.default_rng(3)
    subsets = all_h_subsets(6, 3)
    chosen = [subsets[i] for i in rng.choice(len(subsets), size=9, replace=False)]
    H = Hypergraph.from_vertex_sets(6, 3, chosen)
    sigma = Labeling.from_iterable([1, -1, 1, 1, -1, -1])
    mono = sum(1 for e in chosen if len({sigma.labels[v] for v in e}) == 1)
    assert count_cross_cluster(H, sigma) + mono == H.num_edges


def test_monochromatic_capacity():
    assert monochromatic_capacity(3, 3, 3) == 2
    assert monochromatic_capacity(2, 2, 3) == 0
    assert monochromatic_capacity(50, 50, 3) == 39200


def test_symmetric_difference():
    H = Hypergraph.from_vertex_sets(6, 3, [(0, 1, 2), (1, 2, 3)])
    assert symmetric_difference_size(H, H) == 0
    H2 = H.with_edge_toggled(rank_subset((2, 3, 4), 6))
    assert symmetric_difference_size(H, H2) == 1
    with pytest.raises(ValidationError):
        symmetric_difference_size(H, Hypergraph(7, 3))


def test_symmetric_difference_matches_set_oracle():
    rng = np.random.default_rng(11)
    subsets = all_h_subsets(6, 3)
    for _ in range(20):
        e1 = {subsets[i] for i in rng.choice(20, size=rng.integers(0, 20), replace=False)}
        e2 = {subsets[i] for i in rng.choice(20, size=rng.integers(0, 20), replace=False)}
        H1 = Hypergraph.from_vertex_sets(6, 3, e1)
        H2 = Hypergraph.from_vertex_sets(6, 3, e2)
        assert symmetric_difference_size(H1, H2) == len(e1 ^ e2)


def test_json_round_trip_byte_stable():
    H = Hypergraph.from_vertex_sets(6, 3, [(3, 4, 5), (0, 1, 2), (0, 2, 4)])
    text = H.to_json_str()
    again = Hypergraph.from_json_str(text)
    assert again == H
    assert again.to_json_str() == text
    edges = json.loads(text)["edges"]
    assert edges == sorted(edges)  # canonical lexicographic edge order


def test_hypergraph_validation():
    with pytest.raises(ValidationError):
        Hypergraph(2, 3)
    with pytest.raises(ValidationError):
        Hypergraph(6, 1)
    with pytest.raises(ValidationError):
        Hypergraph(6, 3, frozenset([99]))
    with pytest.raises(ValidationError):
        Hypergraph.from_vertex_sets(6, 3, [(0, 1)])


def test_labeling_basics():
    lab = Labeling.from_iterable([-1, 1, 1, -1])
    assert not lab.labels[0] == 1
    assert lab.canonical().labels == (1, -1, -1, 1)
    assert lab.balanced
    assert not Labeling.from_iterable([1, 1, -1]).balanced
    with pytest.raises(ValidationError):
        Labeling.from_iterable([1, 0, -1])


def test_labeling_enumerations():
    bal = balanced_canonical_labelings(6)
    assert bal.shape == (10, 6)
    assert (bal[:, 0] == 1).all()
    assert (bal.sum(axis=1) == 0).all()
    # lexicographic with +1 before -1: first row is +++---
    assert bal[0].tolist() == [1, 1, 1, -1, -1, -1]
    rows = [tuple(r) for r in bal.tolist()]
    assert len(set(rows)) == 10

    full = all_canonical_labelings(4)
    assert full.shape == (8, 4)
    assert (full[:, 0] == 1).all()
    assert full[0].tolist() == [1, 1, 1, 1]
    assert full[-1].tolist() == [1, -1, -1, -1]

"""The brute-force oracles must reproduce the hand-derived reference values on their own."""

import numpy as np

import oracles as O

F = np.array([1.0, 3.0, 2.0, 6.0])
LV4 = O.dyadic_levels(4)


def test_agglomerative_merge_order():
    history = O.average_linkage_merges([0.0, 1.0, 10.0, 11.0])
    two = history[-2]
    assert sorted(sorted(c) for c in two) == [[0, 1], [2, 3]]


def test_dyadic_distance_enumeration():
    assert O.dyadic_distance(LV4, 4, 0, 1) == 0.5
    assert O.dyadic_distance(LV4, 4, 0, 2) == 1.0
    assert O.dyadic_distance(LV4, 4, 3, 3) == 0.0


def test_tensor_distance_enumeration():
    assert O.tensor_distance(LV4, 4, LV4, 4, (0, 0), (1, 0)) == 0.25
    assert O.tensor_distance(LV4, 4, LV4, 4, (0, 0), (2, 2)) == 1.0


def test_gram_schmidt_h3():
    ws = O.gram_schmidt_node([1, 1, 1])
    G = np.array([[np.dot(a, b) for b in ws] for a in ws])
    assert np.allclose(G, np.eye(2), atol=1e-12)
    assert all(abs(w.sum()) < 1e-12 for w in ws)


def test_gram_schmidt_h2_counting():
    (w,) = O.gram_schmidt_node([1, 1])
    assert np.allclose(np.abs(w), 1 / np.sqrt(2))


def test_operator_oracle_golden():
    assert np.allclose(O.P(LV4, F, 0), [2, 2, 4, 4])
    assert np.allclose(O.Q(LV4, F, 0), [-1, -1, 1, 1])
    assert np.allclose(O.Q(LV4, F, 1), [-1, 1, -2, 2])


def test_quadratic_paraproduct_oracle():
    approx, delta = O.paraproduct_1d(LV4, F, lambda t: t**2, lambda t: 2 * t)
    assert np.allclose(delta, [7, 7, 4, 4], atol=1e-12)
    closed = O.P(LV4, F, -1) ** 2 - sum(O.Q(LV4, F, l) ** 2 for l in range(2))
    assert np.allclose(delta, closed, atol=1e-12)


def test_block_mean_oracle():
    lv2 = O.dyadic_levels(2)
    f = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(O.P2(lv2, lv2, f, -1, -1), 2.5)


def test_pairwise_oracle_golden():
    assert np.isclose(O.pairwise_seminorm(LV4, F, 0.5), 4 * np.sqrt(2))


def test_mixed_oracle_single_quadruple():
    lv2 = O.dyadic_levels(2)
    assert np.isclose(O.mixed_seminorm(lv2, lv2, np.outer([0, 1], [0, 1]), 0.25), 1.0)

import json

import numpy as np
import pytest

import oracles as O
from treepara import (
    PointSet,
    SizeMismatch,
    analyze,
    build_balanced_dyadic_tree,
    build_tensor_basis,
    build_tree_basis,
    build_tree_from_clustering,
    l2_norm_sq,
    synthesize,
)
from treepara.haar_basis import build_node_wavelets, helmert_amplitudes, write_basis_json, write_coefficients_csv
from treepara.tree_core import tree_from_partitions

R2 = np.sqrt(2.0)


def _tree_with_children(sizes, mode="counting"):
    n = sum(sizes)
    edges = np.cumsum([0] + list(sizes))
    mid = [{"elements": list(range(edges[c], edges[c + 1])), "children": list(range(edges[c], edges[c + 1]))}
           for c in range(len(sizes))]
    leaves = [{"elements": [i]} for i in range(n)]
    levels = [[{"elements": list(range(n)), "children": list(range(len(sizes)))}], mid, leaves]
    if all(s == 1 for s in sizes):
        levels = [levels[0], leaves]
    return tree_from_partitions(levels, n, mode)


class TestNodeWavelets:
    def test_single_child_has_none(self):
        t = tree_from_partitions([[{"elements": [0, 1], "children": [0]}],
                                  [{"elements": [0, 1], "children": [0, 1]}],
                                  [{"elements": [0]}, {"elements": [1]}]], 2, "counting")
        assert build_node_wavelets(t, 0, 0) == []

    def test_two_singletons(self):
        (w,) = build_node_wavelets(_tree_with_children([1, 1]), 0, 0)
        assert np.allclose(w.dense(2), [1 / R2, -1 / R2])

    @pytest.mark.parametrize("sizes", [[1, 1, 1], [2, 1, 3], [1, 4, 2, 2]])
    def test_matches_gram_schmidt(self, sizes):
        t = _tree_with_children(sizes)
        ws = [w.dense(t.n) for w in build_node_wavelets(t, 0, 0)]
        ref = O.gram_schmidt_node(sizes)
        G = np.array([[np.dot(a, b) for b in ws] for a in ws])
        assert np.allclose(G, np.eye(len(sizes) - 1), atol=1e-12)
        # same span as the Gram-Schmidt construction
        span = np.array(ref)
        proj = np.array(ws) @ span.T
        assert np.allclose(proj @ proj.T, np.eye(len(ws)), atol=1e-12)

    def test_helmert_rows_zero_mean(self):
        m = np.array([0.2, 0.3, 0.5])
        amps = helmert_amplitudes(m)
        assert np.allclose(amps @ m, 0)
        assert np.allclose((amps**2) @ m, 1)


class TestTreeBasis:
    def test_n4_counting(self):
        b = build_tree_basis(build_balanced_dyadic_tree(4, "counting"))
        rows = b.matrix.toarray()
        assert np.allclose(rows[0], 0.5)
        assert np.allclose(rows[1], [0.5, 0.5, -0.5, -0.5])
        assert np.allclose(rows[2], [1 / R2, -1 / R2, 0, 0])
        assert np.allclose(rows[3], [0, 0, 1 / R2, -1 / R2])

    def test_n1(self):
        b = build_tree_basis(build_balanced_dyadic_tree(1))
        assert len(b) == 1 and np.allclose(b.matrix.toarray(), 1.0)

    @pytest.mark.parametrize("seed", range(3))
    def test_clustering_gram(self, seed):
        pts = PointSet.from_coords(np.random.default_rng(seed).normal(size=(64, 3)))
        b = build_tree_basis(build_tree_from_clustering(pts))
        assert len(b) == 64
        assert np.max(np.abs(b.gram() - np.eye(64))) < 1e-10

    @pytest.mark.parametrize("mode", ["normalized", "counting"])
    def test_levels_and_fractions(self, mode):
        b = build_tree_basis(build_balanced_dyadic_tree(8, mode))
        assert b.levels.tolist() == [-1, 0, 1, 1, 2, 2, 2, 2]
        assert np.allclose(b.node_fractions[1:], [1, .5, .5, .25, .25, .25, .25])
        assert np.max(np.abs(b.gram() - np.eye(8))) < 1e-12


class TestTensorBasis:
    def test_trivial(self):
        t = build_balanced_dyadic_tree(1)
        tb = build_tensor_basis(build_tree_basis(t), build_tree_basis(t))
        assert len(tb) == 1 and tb.kinds.tolist() == [["phi*phi"]]

    def test_kind_counts(self):
        b = build_tree_basis(build_balanced_dyadic_tree(4))
        kinds = build_tensor_basis(b, b).kinds.ravel().tolist()
        assert {k: kinds.count(k) for k in set(kinds)} == {"phi*phi": 1, "psi*phi": 3, "phi*psi": 3, "psi*psi": 9}

    def test_gram_8x4(self):
        tb = build_tensor_basis(build_tree_basis(build_balanced_dyadic_tree(8)),
                                build_tree_basis(build_balanced_dyadic_tree(4)))
        assert np.max(np.abs(tb.gram() - np.eye(32))) < 1e-10

    def test_element_is_outer_product(self):
        b = build_tree_basis(build_balanced_dyadic_tree(4))
        tb = build_tensor_basis(b, b)
        assert np.allclose(tb.element(1, 2), np.outer(b.functions[1].dense(4), b.functions[2].dense(4)))


class TestAnalyze:
    def test_constant(self):
        b = build_tree_basis(build_balanced_dyadic_tree(16))
        c = analyze(np.full(16, 3.0), b)
        assert c[0] != 0 and np.allclose(c[1:], 0, atol=1e-14)

    def test_golden(self):
        b = build_tree_basis(build_balanced_dyadic_tree(4, "counting"))
        c = analyze([1, 3, 2, 6], b)
        assert np.allclose(c, [6, -2, -R2, -2 * R2], atol=1e-12)

    def test_round_trip_256(self):
        b = build_tree_basis(build_balanced_dyadic_tree(256))
        f = np.random.default_rng(0).normal(size=256)
        assert np.max(np.abs(synthesize(analyze(f, b), b) - f)) < 1e-10

    def test_parseval(self):
        b = build_tree_basis(build_balanced_dyadic_tree(64))
        f = np.random.default_rng(1).normal(size=64)
        assert np.isclose(np.sum(analyze(f, b) ** 2), l2_norm_sq(f, b))

    def test_tensor_round_trip_and_direct(self):
        bx = build_tree_basis(build_balanced_dyadic_tree(8))
        by = build_tree_basis(build_balanced_dyadic_tree(4))
        tb = build_tensor_basis(bx, by)
        f = np.random.default_rng(2).normal(size=(8, 4))
        c = analyze(f, tb)
        w = 1 / 32
        assert np.isclose(c[3, 2], np.sum(f * tb.element(3, 2)) * w)
        assert np.max(np.abs(synthesize(c, tb) - f)) < 1e-12

    def test_size_mismatch(self):
        b = build_tree_basis(build_balanced_dyadic_tree(4))
        with pytest.raises(SizeMismatch):
            analyze(np.zeros(5), b)
        with pytest.raises(SizeMismatch):
            synthesize(np.zeros(3), b)


def test_exports(tmp_path):
    b = build_tree_basis(build_balanced_dyadic_tree(4, "counting"))
    write_basis_json(b, tmp_path / "b.json")
    doc = json.loads((tmp_path / "b.json").read_text())
    assert len(doc) == 4 and doc[1]["kind"] == "wavelet"
    write_coefficients_csv(analyze([1, 3, 2, 6], b), b, tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "l,k,j,value" and lines[2] == "0,0,1,-2"

"""Randomized invariants over trees, signals and nonlinearities."""

import warnings

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from treepara import (
    NONLINEARITIES,
    DegenerateMetric,
    PointSet,
    ScaleOperatorStack,
    analyze,
    approx_1d,
    approx_2d,
    build_balanced_dyadic_tree,
    build_tree_basis,
    build_tree_from_clustering,
    dyadic_distance_matrix,
    synthesize,
    tensor_PP,
    tensor_QQ,
    validate_partition_tree,
)

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def clustering_trees(draw, min_n=2, max_n=24):
    n = draw(st.integers(min_n, max_n))
    coords = draw(arrays(np.float64, (n, 2), elements=st.floats(-5, 5, allow_nan=False)))
    method = draw(st.sampled_from(["single", "complete", "average"]))
    cap = draw(st.integers(2, 5))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateMetric)
        return build_tree_from_clustering(PointSet.from_coords(coords), method, cap)


@st.composite
def tree_and_signal(draw):
    t = draw(clustering_trees())
    f = draw(arrays(np.float64, t.n, elements=finite))
    return t, f


@SETTINGS
@given(clustering_trees())
def test_clustering_trees_valid(t):
    assert validate_partition_tree(t).ok


@SETTINGS
@given(clustering_trees(min_n=3))
def test_ultrametric(t):
    rho = dyadic_distance_matrix(t)
    lhs = rho[:, None, :]
    rhs = np.maximum(rho[:, :, None], rho[None, :, :])
    assert np.all(lhs <= rhs + 1e-15)
    assert np.allclose(rho, rho.T)


@SETTINGS
@given(clustering_trees())
def test_basis_orthonormal(t):
    assert np.max(np.abs(build_tree_basis(t).gram() - np.eye(t.n))) < 1e-10


@SETTINGS
@given(tree_and_signal())
def test_round_trip(ts):
    t, f = ts
    b = build_tree_basis(t)
    assert np.max(np.abs(synthesize(analyze(f, b), b) - f)) < 1e-10


@SETTINGS
@given(tree_and_signal())
def test_telescoping(ts):
    t, f = ts
    s = ScaleOperatorStack(t)
    total = s.P(-1, f) + sum(s.Q(l, f) for l in range(t.depth))
    assert np.max(np.abs(total - f)) < 1e-12 * max(1.0, np.max(np.abs(f)))


@SETTINGS
@given(tree_and_signal(), st.data())
def test_projection_algebra(ts, data):
    t, f = ts
    s = ScaleOperatorStack(t)
    if t.depth == 0:
        return
    l = data.draw(st.integers(-1, t.depth - 1))
    m = data.draw(st.integers(-1, t.depth - 1))
    tol = 1e-12 * max(1.0, np.max(np.abs(f)))
    assert np.max(np.abs(s.P(l, s.P(m, f)) - s.P(min(l, m), f))) < tol
    if l >= 0 and m >= 0:
        qq = s.Q(l, s.Q(m, f))
        assert np.max(np.abs(qq - (s.Q(l, f) if l == m else 0))) < tol


@SETTINGS
@given(tree_and_signal(), st.sampled_from(sorted(NONLINEARITIES)), st.booleans())
def test_exactness_1d(ts, name, coarse):
    t, f = ts
    d = approx_1d(ScaleOperatorStack(t), f, name, include_coarse=coarse)
    A = NONLINEARITIES[name]
    scale = max(1.0, float(np.max(np.abs(A(f)))))
    assert np.max(np.abs(d.approx + d.residual - A(f))) <= 1e-12 * scale


@SETTINGS
@given(st.sampled_from([2, 4, 8]), st.sampled_from([2, 4, 8]), st.integers(0, 2**31 - 1),
       st.sampled_from(["square", "cube", "sin", "tanh", "softplus", "identity"]))
def test_exactness_2d_and_additivity(nx, ny, seed, name):
    f = np.random.default_rng(seed).normal(size=(nx, ny))
    st_ = (ScaleOperatorStack(build_balanced_dyadic_tree(nx)), ScaleOperatorStack(build_balanced_dyadic_tree(ny)))
    d = approx_2d(st_, f, name)
    A = NONLINEARITIES[name]
    assert np.max(np.abs(d.approx + d.residual - A(f))) < 1e-12 * max(1.0, np.max(np.abs(A(f))))
    total = sum(a + b for a, b in d.terms.values())
    assert np.max(np.abs(total - d.approx)) < 1e-12 * max(1.0, np.max(np.abs(d.approx)))


@SETTINGS
@given(st.sampled_from([2, 4, 8]), st.sampled_from([2, 4, 8]), st.integers(0, 2**31 - 1))
def test_tensor_separable(nx, ny, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=nx), rng.normal(size=ny)
    sx, sy = ScaleOperatorStack(build_balanced_dyadic_tree(nx)), ScaleOperatorStack(build_balanced_dyadic_tree(ny))
    for l in range(sx.depth):
        for s in range(sy.depth):
            assert np.allclose(tensor_QQ((sx, sy), l, s, np.outer(a, b)), np.outer(sx.Q(l, a), sy.Q(s, b)), atol=1e-12)
            assert np.allclose(tensor_PP((sx, sy), l, s, np.outer(a, b)), np.outer(sx.P(l, a), sy.P(s, b)), atol=1e-12)

"""Haar-like orthonormal bases on trees.

Each node with H children carries H - 1 zero-mean wavelets.  The demo prints
the basis of the 4-point tree, checks orthonormality on a clustering tree,
and transforms a signal both ways.
"""

import numpy as np

from treepara import (
    PointSet,
    analyze,
    build_balanced_dyadic_tree,
    build_tensor_basis,
    build_tree_basis,
    build_tree_from_clustering,
    synthesize,
)

np.set_printoptions(precision=4, suppress=True)

basis = build_tree_basis(build_balanced_dyadic_tree(4, "counting"))
print("basis rows on 4 points (counting measure):")
print(basis.matrix.toarray())

f = np.array([1.0, 3.0, 2.0, 6.0])
c = analyze(f, basis)
print("coefficients of", f, "->", c)
print("reconstruction:", synthesize(c, basis))

pts = PointSet.from_coords(np.random.default_rng(1).normal(size=(64, 2)))
cbasis = build_tree_basis(build_tree_from_clustering(pts, branching_cap=4))
print("clustering tree basis size:", len(cbasis))
print("max |Gram - I|:", np.abs(cbasis.gram() - np.eye(64)).max())

# Tensor products: phi*phi, psi*phi, phi*psi and psi*psi elements.
tb = build_tensor_basis(basis, basis)
kinds, counts = np.unique(tb.kinds, return_counts=True)
print(dict(zip(kinds.tolist(), counts.tolist())))

"""Partition trees on a point set and the distances they induce.

Builds a balanced dyadic tree and a clustering tree, validates both, and
prints the tree distance between a few pairs of points.
"""

import numpy as np

from treepara import (
    PointSet,
    build_balanced_dyadic_tree,
    build_tree_from_clustering,
    dyadic_distance,
    dyadic_distance_matrix,
    tensor_dyadic_distance,
    validate_partition_tree,
)

# A dyadic tree on 8 points: level l has 2^l nodes of measure 2^-l.
tree = build_balanced_dyadic_tree(8)
for l, level in enumerate(tree.levels):
    print(f"level {l}:", [list(nd.elements) for nd in level])
print("valid:", validate_partition_tree(tree).ok)

# Two points are close when a small node holds both of them.
print("rho(0, 1) =", dyadic_distance(tree, 0, 1))
print("rho(0, 7) =", dyadic_distance(tree, 0, 7))

# The same ideas on a tree grown from data. Two clumps on a line separate
# at the first split.
rng = np.random.default_rng(0)
coords = np.concatenate([rng.normal(0, 0.1, 6), rng.normal(5, 0.1, 6)])[:, None]
ctree = build_tree_from_clustering(PointSet.from_coords(coords), "average", branching_cap=3)
print("clustering tree level 1:", [list(nd.elements) for nd in ctree.levels[1]])
rho = dyadic_distance_matrix(ctree)
print("max distance inside first clump:", rho[:6, :6].max())
print("distance across clumps:", rho[0, 6])

# On a product of two trees the distance multiplies across axes.
print("tensor distance (0,0)-(1,0):", tensor_dyadic_distance(tree, tree, (0, 0), (1, 0)))

"""Averaging and detail operators, one and two dimensional.

P^l averages over the children of level-l nodes, Q^l is the detail between
consecutive scales, and the global mean plus all details gives back f.
"""

import numpy as np

from treepara import (
    ScaleOperatorStack,
    build_balanced_dyadic_tree,
    expansion_coefficients,
    tensor_QQ,
)

stack = ScaleOperatorStack(build_balanced_dyadic_tree(4))
f = np.array([1.0, 3.0, 2.0, 6.0])
print("P^0 f =", stack.P(0, f))
print("Q^0 f =", stack.Q(0, f))
print("Q^1 f =", stack.Q(1, f))
print("E_0 f + Q^0 f + Q^1 f =", stack.P(-1, f) + stack.Q(0, f) + stack.Q(1, f))

# Mixed details kill anything of the form u(x) + v(y).
s8 = ScaleOperatorStack(build_balanced_dyadic_tree(8))
rng = np.random.default_rng(0)
g = rng.normal(size=8)[:, None] + rng.normal(size=8)[None, :]
print("max |Q^1 Q^2 (u + v)|:", np.abs(tensor_QQ((s8, s8), 1, 2, g)).max())

# Signed coefficient families: d on one tree, alpha on a product.
d = expansion_coefficients("d", f, build_balanced_dyadic_tree(4, "counting"))
print("family d:", {k: round(v, 4) for k, v in d.as_dict().items()})

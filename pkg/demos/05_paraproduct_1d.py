"""The one-dimensional paraproduct A(f) = A~ + Delta.

For A(t) = t^2 the residual has a closed form; for tanh on a rough signal the
residual is visibly smoother than f, which the decay fit quantifies.
"""

import numpy as np

from treepara import (
    ScaleOperatorStack,
    approx_1d,
    build_balanced_dyadic_tree,
    synthesize_holder_signal,
    verify_residual_gain,
)

stack = ScaleOperatorStack(build_balanced_dyadic_tree(4))
f = np.array([1.0, 3.0, 2.0, 6.0])
d = approx_1d(stack, f, "square")
print("A(t)=t^2, f =", f)
print("  A~    =", d.approx)
print("  Delta =", d.residual)
closed = stack.P(-1, f) ** 2 - sum(stack.Q(l, f) ** 2 for l in range(stack.depth))
print("  A(E_0 f) - sum (Q^l f)^2 =", closed)

alpha = 0.3
big = ScaleOperatorStack(build_balanced_dyadic_tree(1024))
for seed in range(3):
    g = synthesize_holder_signal(big.tree, alpha, seed)
    rep = verify_residual_gain(approx_1d(big, g, "tanh"), alpha)
    print(f"seed {seed}: f exponent {-rep.f_slope:.3f}, Delta exponent {-rep.residual_slope:.3f}, "
          f"gain {rep.gain:.3f} (need {0.8 * alpha:.2f}), passed={rep.passed}")

"""Hölder regularity seen three ways.

A signal is synthesized with wavelet coefficients of size |node|^(alpha+1/2).
Its decay fit, wavelet norm and pairwise seminorm are then compared.
"""

import numpy as np

from treepara import (
    build_balanced_dyadic_tree,
    build_tree_basis,
    pairwise_holder_seminorm,
    synthesize_holder_signal,
    wavelet_decay_table,
    wavelet_holder_norm,
)

alpha = 0.3
for n in (64, 256, 1024):
    tree = build_balanced_dyadic_tree(n)
    basis = build_tree_basis(tree)
    f = synthesize_holder_signal(basis, alpha, seed=0)
    table = wavelet_decay_table(f, basis, alpha + 0.5)
    pw = pairwise_holder_seminorm(f, tree, alpha)
    wn = wavelet_holder_norm(f, basis, alpha)
    print(f"N={n:5d}  decay exponent {table.decay_exponent:.3f} (target {alpha + 0.5})  "
          f"pairwise {pw:.3f}  wavelet {wn:.3f}  ratio {pw / wn:.2f}")

print()
print("per-scale maxima at N=1024:")
for row in table.rows:
    print(f"  l={row.scale[0]:2d}  count={row.count:4d}  max|c|={row.max_abs_coef:.3e}  ratio={row.ratio:.3f}")

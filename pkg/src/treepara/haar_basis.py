"""Orthonormal Haar-like bases on partition trees and their tensor products.

Every node with ``H`` children carries ``H - 1`` wavelets that are constant on
each child, have zero mean over the node and unit norm.  Wavelet ``j`` of a
node is positive on children ``0..j-1`` and negative on child ``j``.  Together
with the constant root function they form an orthonormal basis of signals on
the tree's point set, with inner product ``<f, g> = sum_i f_i g_i mu_i``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import SizeMismatch
from .tree_core import PartitionTree

SCALING = "scaling"
WAVELET = "wavelet"


@dataclass(frozen=True, eq=False)
class BasisFunction:
    kind: str
    level: int
    k: int
    j: int
    support: np.ndarray
    values: np.ndarray

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.level, self.k, self.j)

    def dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[self.support] = self.values
        return out


def helmert_amplitudes(masses) -> np.ndarray:
    """Amplitudes of the ``H - 1`` node wavelets on each of ``H`` children.

    Row ``j - 1`` is ``chi_{c_0..c_{j-1}} / M_j - chi_{c_j} / m_j`` scaled to
    unit norm, where ``m`` are child masses and ``M_j`` their partial sums.
    """
    masses = np.asarray(masses, dtype=float)
    H = masses.size
    amps = np.zeros((max(H - 1, 0), H))
    cum = np.cumsum(masses)
    for j in range(1, H):
        M, m = cum[j - 1], masses[j]
        norm = np.sqrt(1.0 / M + 1.0 / m)
        amps[j - 1, :j] = 1.0 / M / norm
        amps[j - 1, j] = -1.0 / m / norm
    return amps


def build_node_wavelets(tree: PartitionTree, level: int, k: int) -> list[BasisFunction]:
    node = tree.node(level, k)
    if len(node.children) < 2:
        return []
    below = tree.levels[level + 1]
    kids = [below[c] for c in node.children]
    amps = helmert_amplitudes([tree.measure(c.size) for c in kids])
    support = np.concatenate([np.asarray(c.elements, dtype=np.intp) for c in kids])
    out = []
    for j, row in enumerate(amps, start=1):
        values = np.concatenate([np.full(c.size, a) for c, a in zip(kids, row)])
        keep = values != 0.0
        out.append(BasisFunction(WAVELET, level, k, j, support[keep], values[keep]))
    return out


class TreeBasis:
    """Root scaling function followed by all node wavelets, ordered by (l, k, j)."""

    def __init__(self, tree: PartitionTree):
        self.tree = tree
        self.n = tree.n
        root = BasisFunction(
            SCALING, 0, 0, 0,
            np.arange(tree.n), np.full(tree.n, 1.0 / np.sqrt(tree.node_measure(0, 0))),
        )
        functions = [root]
        for l in range(tree.depth):
            for k in range(tree.n_nodes(l)):
                functions.extend(build_node_wavelets(tree, l, k))
        self.functions: list[BasisFunction] = functions
        self.weights = np.full(tree.n, tree.element_measure)

    def __len__(self):
        return len(self.functions)

    @property
    def scaling(self) -> BasisFunction:
        return self.functions[0]

    @property
    def wavelets(self) -> list[BasisFunction]:
        return self.functions[1:]

    @cached_property
    def keys(self) -> list[tuple[int, int, int]]:
        return [f.key for f in self.functions]

    @cached_property
    def kinds(self) -> np.ndarray:
        return np.array([f.kind for f in self.functions])

    @cached_property
    def levels(self) -> np.ndarray:
        """Home level per function; the root scaling function gets ``-1``."""
        return np.array([-1] + [f.level for f in self.functions[1:]], dtype=int)

    @cached_property
    def node_fractions(self) -> np.ndarray:
        """Normalized home-node size ``|X^l_k| / N`` per function."""
        return np.array([self.tree.node_fraction(f.level, f.k) for f in self.functions])

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Sparse ``(N, N)`` matrix whose rows are the basis functions."""
        rows, cols, vals = [], [], []
        for r, f in enumerate(self.functions):
            rows.append(np.full(f.support.size, r))
            cols.append(f.support)
            vals.append(f.values)
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(len(self.functions), self.n),
        )

    def gram(self) -> np.ndarray:
        W = self.matrix
        return (W @ sp.diags(self.weights) @ W.T).toarray()

    def level_slice(self, level: int) -> np.ndarray:
        return np.flatnonzero(self.levels == level)

    def to_json(self) -> list[dict]:
        return [
            {"kind": f.kind, "l": f.level, "k": f.k, "j": f.j,
             "support": f.support.tolist(), "values": f.values.tolist()}
            for f in self.functions
        ]


TENSOR_KINDS = ("phi*phi", "psi*phi", "phi*psi", "psi*psi")


class TensorBasis:
    """Products ``u(x) v(y)`` of functions from two tree bases.

    Element ``(a, b)`` pairs function ``a`` of ``bx`` with function ``b`` of
    ``by``; coefficients are stored as an ``(N_X, N_Y)`` array in that order.
    """

    def __init__(self, bx: TreeBasis, by: TreeBasis):
        self.bx = bx
        self.by = by
        self.shape = (bx.n, by.n)

    def __len__(self):
        return self.bx.n * self.by.n

    @cached_property
    def kinds(self) -> np.ndarray:
        sym = {SCALING: "phi", WAVELET: "psi"}
        kx = np.array([sym[k] for k in self.bx.kinds], dtype=object)
        ky = np.array([sym[k] for k in self.by.kinds], dtype=object)
        return (kx[:, None] + "*" + ky[None, :]).astype(str)

    def element(self, a: int, b: int) -> np.ndarray:
        fx = self.bx.functions[a].dense(self.bx.n)
        fy = self.by.functions[b].dense(self.by.n)
        return np.outer(fx, fy)

    def dense_elements(self) -> np.ndarray:
        """All elements as rows of an ``(N_X N_Y, N_X N_Y)`` array; small bases only."""
        Wx = self.bx.matrix.toarray()
        Wy = self.by.matrix.toarray()
        return np.einsum("ai,bj->abij", Wx, Wy).reshape(len(self), len(self))

    def gram(self) -> np.ndarray:
        E = self.dense_elements()
        w = np.outer(self.bx.weights, self.by.weights).ravel()
        return (E * w) @ E.T


def build_tree_basis(tree: PartitionTree) -> TreeBasis:
    return TreeBasis(tree)


def build_tensor_basis(bx: TreeBasis, by: TreeBasis) -> TensorBasis:
    return TensorBasis(bx, by)


def analyze(f, basis) -> np.ndarray:
    """Expansion coefficients of ``f``: a vector for a tree basis, an ``(N_X, N_Y)`` array for a tensor basis."""
    f = np.asarray(f, dtype=float)
    if isinstance(basis, TensorBasis):
        if f.shape != basis.shape:
            raise SizeMismatch(f"signal shape {f.shape} != basis shape {basis.shape}")
        g = f * basis.bx.weights[:, None] * basis.by.weights[None, :]
        return np.asarray(basis.by.matrix @ (basis.bx.matrix @ g).T).T
    if f.shape != (basis.n,):
        raise SizeMismatch(f"signal shape {f.shape} != ({basis.n},)")
    return basis.matrix @ (f * basis.weights)


def synthesize(coefficients, basis) -> np.ndarray:
    c = np.asarray(coefficients, dtype=float)
    if isinstance(basis, TensorBasis):
        if c.shape != basis.shape:
            raise SizeMismatch(f"coefficient shape {c.shape} != basis shape {basis.shape}")
        return np.asarray(basis.by.matrix.T @ (basis.bx.matrix.T @ c).T).T
    if c.shape != (basis.n,):
        raise SizeMismatch(f"coefficient shape {c.shape} != ({basis.n},)")
    return basis.matrix.T @ c


def l2_norm_sq(f, basis) -> float:
    f = np.asarray(f, dtype=float)
    if isinstance(basis, TensorBasis):
        return float(np.sum(f**2 * np.outer(basis.bx.weights, basis.by.weights)))
    return float(np.sum(f**2 * basis.weights))


def write_basis_json(basis: TreeBasis, path) -> None:
    Path(path).write_text(json.dumps(basis.to_json(), indent=1))


def write_coefficients_csv(coefficients, basis: TreeBasis, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["l", "k", "j", "value"])
        for f, c in zip(basis.functions, coefficients):
            w.writerow([f.level, f.k, f.j, format(float(c), ".17g")])

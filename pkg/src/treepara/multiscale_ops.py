"""Hierarchical averaging and detail operators, 1D and tensor.

Indexing convention used throughout the package:

* ``E_m`` averages a signal over the level-``m`` nodes (``E_0`` is the global
  mean, ``E_L`` is the identity because leaves are singletons).
* ``P^l = E_{l+1}`` for ``l = 0..L-1``, i.e. the projection onto functions
  constant on the children of level-``l`` nodes.  ``P^{-1}`` is ``E_0``.
* ``Q^l = P^l - P^{l-1}``, which equals the projection onto the span of the
  level-``l`` node wavelets.  Hence ``E_0 f + sum_{l=0}^{L-1} Q^l f = f``.

A scale ``l`` here corresponds to the wavelets that live on level-``l`` nodes;
the finest wavelet scale is ``L - 1``.

Tensor operators act on ``(N_X, N_Y)`` arrays axis by axis: the first factor
acts along axis 0 (the X tree), the second along axis 1 (the Y tree).
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import LevelOutOfRange, SizeMismatch
from .haar_basis import TensorBasis, TreeBasis, analyze, helmert_amplitudes
from .tree_core import PartitionTree


class ScaleOperatorStack:
    """Cached conditional-averaging maps ``E_0..E_L`` for one tree."""

    def __init__(self, tree: PartitionTree):
        self.tree = tree
        self.n = tree.n
        self.depth = tree.depth
        self._indicator = []
        self._counts = []
        for l in range(tree.depth + 1):
            lab = tree.labels[l]
            m = tree.n_nodes(l)
            S = sp.csr_matrix((np.ones(self.n), (lab, np.arange(self.n))), shape=(m, self.n))
            self._indicator.append(S)
            self._counts.append(np.asarray(S.sum(axis=1)).ravel())

    @property
    def n_scales(self) -> int:
        return self.depth

    def node_means(self, level: int, f: np.ndarray, axis: int = 0) -> np.ndarray:
        f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
        if f.shape[0] != self.n:
            raise SizeMismatch(f"axis length {f.shape[0]} != tree size {self.n}")
        S = self._indicator[level]
        counts = self._counts[level]
        means = (S @ f.reshape(self.n, -1)) / counts[:, None]
        return means.reshape((S.shape[0],) + f.shape[1:])

    def average(self, level: int, f, axis: int = 0) -> np.ndarray:
        """``E_level`` applied along ``axis``."""
        if not 0 <= level <= self.depth:
            raise LevelOutOfRange(f"level {level} not in 0..{self.depth}")
        means = self.node_means(level, f, axis)
        out = means[self.tree.labels[level]]
        return np.moveaxis(out, 0, axis)

    def _check_scale(self, l: int, lowest: int = 0):
        if not lowest <= l <= self.depth - 1:
            raise LevelOutOfRange(f"scale {l} not in {lowest}..{self.depth - 1}")

    def P(self, l: int, f, axis: int = 0) -> np.ndarray:
        """``P^l = E_{l+1}``; ``l = -1`` gives the global mean."""
        if not -1 <= l <= self.depth - 1:
            raise LevelOutOfRange(f"scale {l} not in -1..{self.depth - 1}")
        return self.average(l + 1, f, axis)

    def Q(self, l: int, f, axis: int = 0) -> np.ndarray:
        self._check_scale(l)
        return self.P(l, f, axis) - self.P(l - 1, f, axis)


def _pair(stacks):
    sx, sy = stacks
    return sx, sy


def scaling_P(stack: ScaleOperatorStack, l: int, f) -> np.ndarray:
    """``P^l f`` for ``l = -1..L-1``."""
    return stack.P(l, f)


def wavelet_Q(stack: ScaleOperatorStack, l: int, f) -> np.ndarray:
    return stack.Q(l, f)


def tensor_PP(stacks, l: int, s: int, f) -> np.ndarray:
    sx, sy = _pair(stacks)
    return sy.P(s, sx.P(l, f, axis=0), axis=1)


def tensor_QP(stacks, l: int, s: int, f) -> np.ndarray:
    sx, sy = _pair(stacks)
    return sy.P(s, sx.Q(l, f, axis=0), axis=1)


def tensor_PQ(stacks, l: int, s: int, f) -> np.ndarray:
    sx, sy = _pair(stacks)
    return sy.Q(s, sx.P(l, f, axis=0), axis=1)


def tensor_QQ(stacks, l: int, s: int, f) -> np.ndarray:
    sx, sy = _pair(stacks)
    return sy.Q(s, sx.Q(l, f, axis=0), axis=1)


# --- expansion coefficients -------------------------------------------------

FAMILIES_1D = ("s", "d")
FAMILIES_2D = ("omega", "beta", "gamma", "alpha")
FAMILIES = FAMILIES_1D + FAMILIES_2D

_FACTORS = {
    "s": ("phi",), "d": ("psi",),
    "omega": ("phi", "phi"), "beta": ("psi", "phi"),
    "gamma": ("phi", "psi"), "alpha": ("psi", "psi"),
}


@dataclass(frozen=True)
class _ScaleFunctions:
    """Functions attached to one scale of one tree, one sparse row each."""

    keys: list            # (k, j) per row
    matrix: sp.csr_matrix  # (rows, N) function values
    fractions: np.ndarray  # normalized home-node size per row


class _ScaleCatalogue:
    """Per-scale scaling (``phi``) and wavelet (``psi``) functions of a tree.

    ``phi^l_{k,j}`` is the unit-norm indicator of child ``j`` (1-based) of
    node ``(l, k)``; ``psi^l_{k,j}`` is wavelet ``j`` of that node.  Both
    families are orthonormal, so ``P^l f = sum <f, phi> phi`` and
    ``Q^l f = sum <f, psi> psi``.
    """

    def __init__(self, tree: PartitionTree):
        self.tree = tree

    @cached_property
    def weights(self) -> np.ndarray:
        return np.full(self.tree.n, self.tree.element_measure)

    def functions(self, kind: str, l: int) -> _ScaleFunctions:
        return self._cache[(kind, l)]

    @cached_property
    def _cache(self) -> dict:
        tree = self.tree
        out = {}
        for l in range(tree.depth):
            below = tree.levels[l + 1]
            for kind in ("phi", "psi"):
                keys, fracs, rows, cols, vals = [], [], [], [], []
                for node in tree.levels[l]:
                    kids = [below[c] for c in node.children]
                    frac = node.size / tree.n
                    if kind == "phi":
                        amps = np.diag([1.0 / np.sqrt(tree.measure(c.size)) for c in kids])
                    else:
                        amps = helmert_amplitudes([tree.measure(c.size) for c in kids])
                    for j, amp in enumerate(amps, start=1):
                        r = len(keys)
                        for c, a in zip(kids, amp):
                            if a != 0.0:
                                rows.extend([r] * c.size)
                                cols.extend(c.elements)
                                vals.extend([a] * c.size)
                        keys.append((node.k, j))
                        fracs.append(frac)
                matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(keys), tree.n))
                out[(kind, l)] = _ScaleFunctions(keys, matrix, np.array(fracs))
        return out


_CATALOGUES: "weakref.WeakKeyDictionary[PartitionTree, _ScaleCatalogue]" = weakref.WeakKeyDictionary()


def _catalogue(tree: PartitionTree) -> _ScaleCatalogue:
    cat = _CATALOGUES.get(tree)
    if cat is None:
        cat = _CATALOGUES[tree] = _ScaleCatalogue(tree)
    return cat


@dataclass
class CoefficientTable:
    """Signed expansion coefficients of one family.

    Keys are ``(l, k, j)`` for ``s``/``d`` and ``(l, s, k, j, r, i)`` for the
    tensor families; ``k``/``r`` are 0-based node indices, ``j``/``i`` 1-based
    child (``phi``) or wavelet (``psi``) indices.  ``fractions`` holds the
    normalized size of the home node (product of sizes for tensor keys).
    """

    family: str
    keys: list
    values: np.ndarray
    fractions: np.ndarray

    def __len__(self):
        return len(self.keys)

    def as_dict(self) -> dict:
        return dict(zip(self.keys, self.values.tolist()))

    @property
    def is_tensor(self) -> bool:
        return self.family in FAMILIES_2D

    def scales(self) -> np.ndarray:
        """``l`` per entry (1D) or ``(l, s)`` per entry (tensor)."""
        if self.is_tensor:
            return np.array([(k[0], k[1]) for k in self.keys], dtype=int).reshape(-1, 2)
        return np.array([k[0] for k in self.keys], dtype=int)

    def csv_rows(self):
        for key, v in zip(self.keys, self.values):
            if self.is_tensor:
                l, s, k, j, r, i = key
            else:
                (l, k, j), s, r, i = key, "", "", ""
            yield [self.family, l, s, k, j, r, i, v]


def _trees_of(basis):
    if isinstance(basis, TensorBasis):
        return basis.bx.tree, basis.by.tree
    if isinstance(basis, TreeBasis):
        return (basis.tree,)
    if isinstance(basis, PartitionTree):
        return (basis,)
    if isinstance(basis, ScaleOperatorStack):
        return (basis.tree,)
    return tuple(b.tree if not isinstance(b, PartitionTree) else b for b in basis)


def expansion_coefficients(family: str, f, basis) -> CoefficientTable:
    """Coefficient table of ``family`` for the signal ``f``.

    ``basis`` may be a tree, a stack, a :class:`TreeBasis`, a
    :class:`TensorBasis`, or a pair of any of these for tensor families.
    """
    if family not in _FACTORS:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    f = np.asarray(f, dtype=float)
    trees = _trees_of(basis)
    factors = _FACTORS[family]
    if len(factors) != len(trees):
        raise SizeMismatch(f"family {family!r} needs {len(factors)} tree(s), got {len(trees)}")
    if f.shape != tuple(t.n for t in trees):
        raise SizeMismatch(f"signal shape {f.shape} != {tuple(t.n for t in trees)}")

    keys, values, fracs = [], [], []
    if len(trees) == 1:
        cat = _catalogue(trees[0])
        for l in range(trees[0].depth):
            fn = cat.functions(factors[0], l)
            coef = fn.matrix @ (f * cat.weights)
            keys.extend((l, k, j) for k, j in fn.keys)
            values.append(coef)
            fracs.append(fn.fractions)
    else:
        cx, cy = _catalogue(trees[0]), _catalogue(trees[1])
        g = f * cx.weights[:, None] * cy.weights[None, :]
        for l in range(trees[0].depth):
            fx = cx.functions(factors[0], l)
            gx = fx.matrix @ g
            for s in range(trees[1].depth):
                fy = cy.functions(factors[1], s)
                block = np.asarray((fy.matrix @ gx.T).T)
                keys.extend((l, s, k, j, r, i) for (k, j) in fx.keys for (r, i) in fy.keys)
                values.append(block.ravel())
                fracs.append(np.outer(fx.fractions, fy.fractions).ravel())
    values = np.concatenate(values) if values else np.zeros(0)
    fracs = np.concatenate(fracs) if fracs else np.zeros(0)
    return CoefficientTable(family, keys, values, fracs)


def wavelet_coefficient_table(f, basis) -> CoefficientTable:
    """Family ``d`` (tree basis) or ``alpha`` (tensor basis) read off :func:`analyze`."""
    c = analyze(f, basis)
    if isinstance(basis, TensorBasis):
        wx = np.flatnonzero(basis.bx.kinds == "wavelet")
        wy = np.flatnonzero(basis.by.kinds == "wavelet")
        keys = [
            (basis.bx.functions[a].level, basis.by.functions[b].level,
             basis.bx.functions[a].k, basis.bx.functions[a].j,
             basis.by.functions[b].k, basis.by.functions[b].j)
            for a in wx for b in wy
        ]
        vals = c[np.ix_(wx, wy)].ravel()
        fr = np.outer(basis.bx.node_fractions[wx], basis.by.node_fractions[wy]).ravel()
        return CoefficientTable("alpha", keys, vals, fr)
    w = np.flatnonzero(basis.kinds == "wavelet")
    return CoefficientTable("d", [basis.keys[i] for i in w], c[w], basis.node_fractions[w])

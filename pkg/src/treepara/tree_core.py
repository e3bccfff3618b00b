"""Finite point sets, leveled partition trees and the tree-induced dyadic distances.

A :class:`PartitionTree` stores every level as a full partition of the ids
``0..N-1``.  Level 0 is the root, the deepest level ``L`` holds singletons,
and each node lists the indices of its children one level down.  Trees built
here are never mutated after construction.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import pdist

from .errors import (
    DegenerateMetric,
    MissingCoordinates,
    NotPowerOfTwo,
    PartitionViolation,
    SchemaError,
    TooSmall,
    UnknownId,
)

MEASURE_MODES = ("normalized", "counting")
LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True)
class PointSet:
    """Elements ``0..N-1`` with optional coordinates of shape ``(N, m)``."""

    n: int
    coords: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise TooSmall("a point set needs at least one element")
        if self.coords is not None:
            coords = np.asarray(self.coords, dtype=float)
            if coords.ndim == 1:
                coords = coords[:, None]
            if coords.shape[0] != self.n:
                raise SchemaError(f"expected {self.n} coordinate rows, got {coords.shape[0]}")
            object.__setattr__(self, "coords", coords)

    @classmethod
    def from_coords(cls, coords, name: str = "") -> "PointSet":
        coords = np.asarray(coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        return cls(coords.shape[0], coords, name)

    @property
    def ids(self) -> range:
        return range(self.n)


@dataclass(frozen=True)
class Node:
    level: int
    k: int
    elements: tuple[int, ...]
    children: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Violation:
    level: int
    k: int | None
    axiom: str
    message: str

    def __str__(self):
        where = f"l={self.level}" + ("" if self.k is None else f", k={self.k}")
        return f"[{self.axiom}] {where}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"level": v.level, "k": v.k, "axiom": v.axiom, "message": v.message}
                for v in self.violations
            ],
        }


@dataclass(frozen=True, eq=False)
class PartitionTree:
    """Leveled nested partitions of ``{0, ..., n-1}``.

    ``levels[l][k]`` is node ``k`` of level ``l``.  ``measure_mode`` selects
    the node measure: ``"normalized"`` gives ``|node| / n`` (root mass 1) and
    ``"counting"`` gives the raw cardinality.
    """

    levels: tuple[tuple[Node, ...], ...]
    n: int
    measure_mode: str = "normalized"
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        if self.measure_mode not in MEASURE_MODES:
            raise ValueError(f"measure_mode must be one of {MEASURE_MODES}")

    def __eq__(self, other):
        if not isinstance(other, PartitionTree):
            return NotImplemented
        return (
            self.n == other.n
            and self.measure_mode == other.measure_mode
            and self.levels == other.levels
        )

    __hash__ = object.__hash__

    @property
    def depth(self) -> int:
        """``L``, the index of the finest level."""
        return len(self.levels) - 1

    def node(self, level: int, k: int) -> Node:
        return self.levels[level][k]

    def n_nodes(self, level: int) -> int:
        return len(self.levels[level])

    def nodes(self) -> Iterable[Node]:
        for level in self.levels:
            yield from level

    @property
    def element_measure(self) -> float:
        return 1.0 if self.measure_mode == "counting" else 1.0 / self.n

    def measure(self, size: int) -> float:
        return size * self.element_measure

    def node_measure(self, level: int, k: int) -> float:
        return self.measure(self.levels[level][k].size)

    def node_fraction(self, level: int, k: int) -> float:
        """Normalized size ``|node| / n`` regardless of the measure mode."""
        return self.levels[level][k].size / self.n

    def with_measure(self, mode: str) -> "PartitionTree":
        return PartitionTree(self.levels, self.n, mode, self.diagnostics)

    @cached_property
    def labels(self) -> tuple[np.ndarray, ...]:
        """``labels[l][i]`` is the index of the level-``l`` node holding element ``i``."""
        out = []
        for level in self.levels:
            lab = np.full(self.n, -1, dtype=np.intp)
            for node in level:
                lab[list(node.elements)] = node.k
            out.append(lab)
        return tuple(out)

    @cached_property
    def is_balanced_dyadic(self) -> bool:
        L = self.depth
        if self.n != 2**L:
            return False
        for l, level in enumerate(self.levels[:-1]):
            if len(level) != 2**l:
                return False
            for node in level:
                if len(node.children) != 2 or node.size != self.n >> l:
                    return False
        return True

    def check_id(self, i: int) -> None:
        if not (0 <= int(i) < self.n):
            raise UnknownId(f"element id {i} not in 0..{self.n - 1}")


def _materialize(
    root_children, n: int, measure_mode: str, diagnostics: Sequence[str] = ()
) -> PartitionTree:
    """Build leveled partitions from a ``children(elements) -> list`` rule.

    Singletons are carried down unchanged (one child) until every branch reaches
    a singleton, so all level-``L`` nodes are singletons.
    """
    levels = []
    current = [tuple(range(n))]
    while True:
        nxt: list[tuple[int, ...]] = []
        child_index: list[tuple[int, ...]] = []
        done = all(len(e) == 1 for e in current)
        if not done:
            for elements in current:
                parts = [elements] if len(elements) == 1 else root_children(elements)
                child_index.append(tuple(range(len(nxt), len(nxt) + len(parts))))
                nxt.extend(tuple(p) for p in parts)
        else:
            child_index = [()] * len(current)
        l = len(levels)
        levels.append(
            tuple(Node(l, k, e, ch) for k, (e, ch) in enumerate(zip(current, child_index)))
        )
        if done:
            break
        current = nxt
    return PartitionTree(tuple(levels), n, measure_mode, tuple(diagnostics))


def _halves(elements):
    half = len(elements) // 2
    return [tuple(elements[:half]), tuple(elements[half:])]


def build_balanced_dyadic_tree(points: PointSet | int, measure_mode: str = "normalized") -> PartitionTree:
    n = points if isinstance(points, int) else points.n
    if n < 1 or n & (n - 1):
        raise NotPowerOfTwo(f"N={n} is not a power of two")
    return _materialize(_halves, n, measure_mode)


def build_tree_from_clustering(
    points: PointSet,
    linkage_method: str = "average",
    branching_cap: int = 4,
    measure_mode: str = "normalized",
) -> PartitionTree:
    """Partition tree from an agglomerative dendrogram.

    Each dendrogram merge becomes a binary split.  A child whose merge height
    ties its parent's is flattened into the parent (so exact ties give
    multi-way splits) as long as the parent keeps at most ``branching_cap``
    children.  When all points coincide, a balanced split is used instead and
    a :class:`DegenerateMetric` warning is issued.
    """
    if points.coords is None:
        raise MissingCoordinates("clustering needs coordinates")
    if linkage_method not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    if branching_cap < 2:
        raise ValueError("branching_cap must be at least 2")
    n = points.n
    if n < 2:
        raise TooSmall("clustering needs N >= 2")

    dists = pdist(points.coords)
    if not np.any(dists > 0):
        msg = "all pairwise distances are zero; fell back to balanced halving"
        warnings.warn(msg, DegenerateMetric, stacklevel=2)
        return _materialize(_halves, n, measure_mode, [msg])

    Z = linkage(dists, method=linkage_method)
    kids: dict[int, tuple[int, int]] = {}
    height: dict[int, float] = {}
    members: dict[int, tuple[int, ...]] = {i: (i,) for i in range(n)}
    for row, (a, b, h, _) in enumerate(Z):
        c = n + row
        a, b = int(a), int(b)
        kids[c] = (a, b)
        height[c] = float(h)
        members[c] = tuple(sorted(members[a] + members[b]))
    cluster_of = {members[c]: c for c in members}

    def split(elements):
        c = cluster_of[tuple(elements)]
        parts = list(kids[c])
        changed = True
        while changed and len(parts) < branching_cap:
            changed = False
            for idx, p in enumerate(parts):
                if p in kids and np.isclose(height[p], height[c], rtol=1e-12, atol=0.0):
                    parts[idx : idx + 1] = list(kids[p])
                    changed = True
                    break
        parts.sort(key=lambda p: members[p][0])
        return [members[p] for p in parts]

    return _materialize(split, n, measure_mode)


def tree_from_partitions(
    levels: Sequence[Sequence[dict]], n: int, measure_mode: str = "normalized"
) -> PartitionTree:
    out = []
    for l, level in enumerate(levels):
        nodes = []
        for pos, raw in enumerate(level):
            k = int(raw.get("k", pos))
            nodes.append(
                Node(l, k, tuple(sorted(int(e) for e in raw["elements"])),
                     tuple(int(c) for c in raw.get("children", ())))
            )
        nodes.sort(key=lambda nd: nd.k)
        out.append(tuple(nodes))
    return PartitionTree(tuple(out), n, measure_mode)


def load_tree_spec(document, measure_mode: str = "normalized") -> PartitionTree:
    """Parse and validate a tree-spec document.

    ``document`` may be a mapping, a JSON string, or a path to a JSON file
    shaped like ``{"n": N, "levels": [[{"k", "elements", "children"}, ...], ...]}``.
    """
    if isinstance(document, Path) or (isinstance(document, str) and not document.lstrip().startswith("{")):
        document = json.loads(Path(document).read_text())
    elif isinstance(document, str):
        document = json.loads(document)
    if not isinstance(document, dict):
        raise SchemaError("tree spec must be a JSON object")
    if "n" not in document or "levels" not in document:
        raise SchemaError("tree spec needs 'n' and 'levels'")
    n = document["n"]
    levels = document["levels"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("'n' must be a positive integer")
    if not isinstance(levels, list) or not levels:
        raise SchemaError("'levels' must be a non-empty list")
    for l, level in enumerate(levels):
        if not isinstance(level, list) or not level:
            raise SchemaError(f"level {l} must be a non-empty list of nodes")
        for raw in level:
            if not isinstance(raw, dict) or "elements" not in raw:
                raise SchemaError(f"node at level {l} must be an object with 'elements'")
            if not isinstance(raw["elements"], list) or not all(
                isinstance(e, int) and not isinstance(e, bool) for e in raw["elements"]
            ):
                raise SchemaError(f"node elements at level {l} must be a list of ints")
            if not isinstance(raw.get("children", []), list):
                raise SchemaError(f"node children at level {l} must be a list")
    tree = tree_from_partitions(levels, n, measure_mode)
    report = validate_partition_tree(tree)
    if not report.ok:
        raise PartitionViolation(report)
    return tree


def dump_tree_spec(tree: PartitionTree) -> dict:
    return {
        "n": tree.n,
        "levels": [
            [{"k": nd.k, "elements": list(nd.elements), "children": list(nd.children)} for nd in level]
            for level in tree.levels
        ],
    }


def validate_partition_tree(tree: PartitionTree) -> ValidationReport:
    """Check every partition-tree axiom; violations are returned, not raised."""
    report = ValidationReport()
    add = report.violations.append
    full = set(range(tree.n))
    if not tree.levels:
        add(Violation(0, None, "root", "tree has no levels"))
        return report

    root = tree.levels[0]
    if len(root) != 1 or set(root[0].elements) != full:
        add(Violation(0, None, "root", "level 0 must be a single node holding every id"))

    prev_count = 0
    for l, level in enumerate(tree.levels):
        seen: dict[int, int] = {}
        for pos, node in enumerate(level):
            if node.k != pos:
                add(Violation(l, node.k, "indexing", f"node at position {pos} has k={node.k}"))
            if not node.elements:
                add(Violation(l, node.k, "nonempty", "node has no elements"))
            for e in node.elements:
                if e not in full:
                    add(Violation(l, node.k, "coverage", f"element {e} outside 0..{tree.n - 1}"))
                elif e in seen:
                    add(Violation(l, node.k, "disjointness", f"element {e} also in node {seen[e]}"))
                else:
                    seen[e] = node.k
        missing = full - set(seen)
        if missing:
            add(Violation(l, None, "coverage", f"ids {sorted(missing)[:10]} not covered"))
        if len(level) < prev_count:
            add(Violation(l, None, "monotone_count", f"n({l})={len(level)} < n({l - 1})={prev_count}"))
        prev_count = len(level)

    L = tree.depth
    for l, level in enumerate(tree.levels):
        if l == L:
            for node in level:
                if node.children:
                    add(Violation(l, node.k, "children", "finest-level node has children"))
                if node.size != 1:
                    add(Violation(l, node.k, "singleton_leaves", f"finest node has {node.size} elements"))
            continue
        below = tree.levels[l + 1]
        parent_of: dict[int, int] = {}
        for node in level:
            if not node.children:
                add(Violation(l, node.k, "children", "non-finest node has no children"))
                continue
            union: set[int] = set()
            for c in node.children:
                if not (0 <= c < len(below)):
                    add(Violation(l, node.k, "children", f"child index {c} out of range"))
                    continue
                if c in parent_of:
                    add(Violation(l + 1, c, "children", f"child of both {parent_of[c]} and {node.k}"))
                parent_of[c] = node.k
                union |= set(below[c].elements)
            if union != set(node.elements):
                add(Violation(l, node.k, "refinement", "elements differ from the union of children"))
        orphans = [c.k for c in below if c.k not in parent_of]
        if orphans:
            add(Violation(l + 1, None, "children", f"nodes {orphans[:10]} have no parent"))
    return report


def dyadic_distance_matrix(tree: PartitionTree) -> np.ndarray:
    """``rho[i, j]`` = measure of the smallest node containing both ``i`` and ``j``."""
    n = tree.n
    rho = np.full((n, n), tree.node_measure(0, 0))
    for l in range(1, tree.depth + 1):
        lab = tree.labels[l]
        sizes = np.array([nd.size for nd in tree.levels[l]], dtype=float)
        same = lab[:, None] == lab[None, :]
        rho = np.where(same, np.minimum(rho, tree.measure(1) * sizes[lab][:, None]), rho)
    np.fill_diagonal(rho, 0.0)
    return rho


def dyadic_distance(tree: PartitionTree, i: int, j: int) -> float:
    tree.check_id(i)
    tree.check_id(j)
    if i == j:
        return 0.0
    best = tree.node_measure(0, 0)
    for l in range(1, tree.depth + 1):
        lab = tree.labels[l]
        if lab[i] != lab[j]:
            break
        best = min(best, tree.node_measure(l, lab[i]))
    return best


def smallest_nonsingleton_measure(tree: PartitionTree) -> np.ndarray:
    """Per element, the measure of the smallest node holding it and some other element.

    For ``n == 1`` the root measure is returned.
    """
    out = np.full(tree.n, tree.node_measure(0, 0))
    for l in range(1, tree.depth + 1):
        lab = tree.labels[l]
        sizes = np.array([nd.size for nd in tree.levels[l]])
        s = sizes[lab]
        out = np.where(s >= 2, np.minimum(out, tree.measure(1) * s), out)
    return out


def tensor_dyadic_distance(
    tree_x: PartitionTree, tree_y: PartitionTree, a: tuple[int, int], b: tuple[int, int]
) -> float:
    """Measure of the smallest product node containing both pairs.

    A factor whose two coordinates coincide contributes the smallest node with
    at least two elements around that coordinate; singleton nodes never bound
    a distance.
    """
    (i, p), (j, q) = a, b
    for t, e in ((tree_x, i), (tree_x, j), (tree_y, p), (tree_y, q)):
        t.check_id(e)
    if i == j and p == q:
        return 0.0
    fx = dyadic_distance(tree_x, i, j) if i != j else float(smallest_nonsingleton_measure(tree_x)[i])
    fy = dyadic_distance(tree_y, p, q) if p != q else float(smallest_nonsingleton_measure(tree_y)[p])
    return fx * fy


def read_pointset_csv(path, name: str | None = None) -> PointSet:
    """Read ``id,x0,...,x{m-1}`` rows; ids must be exactly ``0..N-1``."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "id":
            raise SchemaError(f"{path}: first column must be 'id'")
        rows = [r for r in reader if r]
    if not rows:
        raise SchemaError(f"{path}: no rows")
    try:
        ids = [int(r[0]) for r in rows]
        coords = np.array([[float(v) for v in r[1:]] for r in rows]) if len(header) > 1 else None
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    order = np.argsort(ids)
    if sorted(ids) != list(range(len(ids))):
        raise SchemaError(f"{path}: ids must be unique and contiguous from 0")
    if coords is not None:
        coords = coords[order]
    return PointSet(len(ids), coords, name if name is not None else path.stem)

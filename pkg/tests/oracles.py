"""Brute-force reference computations.

Everything here is written from definitions with plain loops and numpy only,
without importing the package, so the tests compare two independent routes.
"""

from itertools import combinations

import numpy as np


# --- trees -------------------------------------------------------------------

def dyadic_levels(n):
    """Balanced binary partitions of range(n) as a list of lists of sets."""
    levels = [[set(range(n))]]
    while any(len(b) > 1 for b in levels[-1]):
        nxt = []
        for b in levels[-1]:
            s = sorted(b)
            if len(s) == 1:
                nxt.append(set(s))
            else:
                nxt.append(set(s[: len(s) // 2]))
                nxt.append(set(s[len(s) // 2:]))
        levels.append(nxt)
    return levels


def average_linkage_merges(x):
    """Naive agglomerative clustering of 1D points; returns the cluster list after each merge."""
    clusters = [frozenset([i]) for i in range(len(x))]
    history = [list(clusters)]
    while len(clusters) > 1:
        best = None
        for a, b in combinations(range(len(clusters)), 2):
            d = np.mean([abs(x[i] - x[j]) for i in clusters[a] for j in clusters[b]])
            if best is None or d < best[0]:
                best = (d, a, b)
        _, a, b = best
        merged = clusters[a] | clusters[b]
        clusters = [c for t, c in enumerate(clusters) if t not in (a, b)] + [merged]
        history.append(list(clusters))
    return history


def dyadic_distance(levels, n, i, j):
    if i == j:
        return 0.0
    return min(len(node) / n for lev in levels for node in lev if i in node and j in node)


def tensor_distance(levels_x, nx, levels_y, ny, a, b):
    """Smallest product node with non-singleton factors that contains both pairs."""
    if a == b:
        return 0.0
    best = np.inf
    for lx in levels_x:
        for A in lx:
            if a[0] not in A or b[0] not in A or (len(A) == 1 and nx > 1):
                continue
            for ly in levels_y:
                for B in ly:
                    if a[1] not in B or b[1] not in B or (len(B) == 1 and ny > 1):
                        continue
                    best = min(best, len(A) / nx * len(B) / ny)
    return best


# --- bases -------------------------------------------------------------------

def gram_schmidt_node(sizes, weight=1.0):
    """Orthonormal zero-mean functions on a node with children of the given sizes.

    Start from the constant and the child indicators, orthonormalize, drop the
    constant.  Inner product is ``sum f g * weight``.
    """
    n = sum(sizes)
    edges = np.cumsum([0] + list(sizes))
    vecs = [np.ones(n)]
    for c in range(len(sizes) - 1):
        v = np.zeros(n)
        v[edges[c]:edges[c + 1]] = 1.0
        vecs.append(v)
    out = []
    for v in vecs:
        w = v.copy()
        for u in out:
            w -= np.sum(w * u) * weight * u
        out.append(w / np.sqrt(np.sum(w * w) * weight))
    return out[1:]


# --- operators ---------------------------------------------------------------

def conditional_average(levels, f, level):
    """Average of ``f`` over each node of ``levels[level]``, written back pointwise."""
    out = np.empty(len(f))
    for node in levels[level]:
        idx = sorted(node)
        out[idx] = np.mean([f[i] for i in idx])
    return out


def P(levels, f, l):
    """``P^l`` = average over level ``l + 1``; ``P^{-1}`` is the global mean."""
    return conditional_average(levels, f, l + 1)


def Q(levels, f, l):
    return P(levels, f, l) - P(levels, f, l - 1)


def P2(levels_x, levels_y, f, l, s):
    """Explicit quadruple-loop block averaging of a matrix."""
    nx, ny = f.shape
    out = np.empty_like(f, dtype=float)
    for A in levels_x[l + 1]:
        for B in levels_y[s + 1]:
            m = sum(f[i, j] for i in A for j in B) / (len(A) * len(B))
            for i in A:
                for j in B:
                    out[i, j] = m
    return out


def QQ(lx, ly, f, l, s):
    return P2(lx, ly, f, l, s) - P2(lx, ly, f, l - 1, s) - P2(lx, ly, f, l, s - 1) + P2(lx, ly, f, l - 1, s - 1)


def QP(lx, ly, f, l, s):
    return P2(lx, ly, f, l, s) - P2(lx, ly, f, l - 1, s)


def PQ(lx, ly, f, l, s):
    return P2(lx, ly, f, l, s) - P2(lx, ly, f, l, s - 1)


def paraproduct_1d(levels, f, A, dA):
    L = len(levels) - 1
    approx = sum(dA(P(levels, f, l)) * Q(levels, f, l) for l in range(L))
    return approx, A(f) - approx


def paraproduct_2d(lx, ly, f, A, dA, d2A):
    """Double loop over (l, s) evaluated entry by entry."""
    Lx, Ly = len(lx) - 1, len(ly) - 1
    nx, ny = f.shape
    approx = np.zeros((nx, ny))
    for l in range(Lx):
        for s in range(Ly):
            pp, qq = P2(lx, ly, f, l, s), QQ(lx, ly, f, l, s)
            qp, pq = QP(lx, ly, f, l, s), PQ(lx, ly, f, l, s)
            for i in range(nx):
                for j in range(ny):
                    approx[i, j] += dA(pp[i, j]) * qq[i, j] + d2A(pp[i, j]) * qp[i, j] * pq[i, j]
    return approx, A(f) - approx


# --- Holder quantities -------------------------------------------------------

def pairwise_seminorm(levels, f, alpha):
    n = len(f)
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            best = max(best, abs(f[i] - f[j]) / dyadic_distance(levels, n, i, j) ** alpha)
    return best


def mixed_seminorm(lx, ly, f, alpha):
    nx, ny = f.shape
    best = 0.0
    for i in range(nx):
        for j in range(i + 1, nx):
            rx = dyadic_distance(lx, nx, i, j) ** alpha
            for p in range(ny):
                for q in range(p + 1, ny):
                    ry = dyadic_distance(ly, ny, p, q) ** alpha
                    d = f[i, p] - f[i, q] - f[j, p] + f[j, q]
                    best = max(best, abs(d) / (rx * ry))
    return best

"""Hölder regularity on trees: pairwise seminorms, wavelet norms, decay fits, synthesis.

Wavelet-side quantities compare a coefficient on node ``X^l_k`` with the
normalized node size ``|X^l_k| / N`` raised to an exponent.  On balanced
dyadic trees that size is exactly ``2^{-l}``, so the ratios reduce to the
``2^{-l(alpha + 1/2)}`` form; on other trees the node-size form is used and
reports say so.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import SizeMismatch, TooLarge, TooSmall
from .haar_basis import TensorBasis, TreeBasis, build_tensor_basis, build_tree_basis, synthesize
from .multiscale_ops import CoefficientTable, wavelet_coefficient_table
from .tree_core import PartitionTree, dyadic_distance_matrix, smallest_nonsingleton_measure

ZERO_COEF = 1e-14
MIXED_GUARD = 4096
MIN_FIT_COUNT = 8


# --- pairwise seminorms ------------------------------------------------------

def pairwise_holder_seminorm(f, tree: PartitionTree, alpha: float) -> float:
    """Smallest ``C`` with ``|f_i - f_j| <= C rho(i, j)^alpha`` over all pairs."""
    f = np.asarray(f, dtype=float)
    if tree.n < 2:
        raise TooSmall("need at least two points")
    if f.shape != (tree.n,):
        raise SizeMismatch(f"signal shape {f.shape} != ({tree.n},)")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    rho = dyadic_distance_matrix(tree)
    iu = np.triu_indices(tree.n, 1)
    diffs = np.abs(f[:, None] - f[None, :])[iu]
    return float(np.max(diffs / rho[iu] ** alpha))


def pairwise_holder_seminorm_2d(
    f, trees, alpha: float, allow_large: bool = False, max_size: int = MIXED_GUARD
) -> tuple[float, float, float]:
    """``(mixed, row, column)`` seminorms over every quadruple / pair.

    Distances between points that differ in one coordinate use the product
    distance of :func:`treepara.tree_core.tensor_dyadic_distance`.
    """
    tx, ty = trees
    f = np.asarray(f, dtype=float)
    if f.shape != (tx.n, ty.n):
        raise SizeMismatch(f"signal shape {f.shape} != ({tx.n}, {ty.n})")
    if tx.n < 2 or ty.n < 2:
        raise TooSmall("need at least two points per axis")
    if tx.n * ty.n > max_size and not allow_large:
        raise TooLarge(f"N*M = {tx.n * ty.n} exceeds {max_size}; pass allow_large=True")
    rx, ry = dyadic_distance_matrix(tx), dyadic_distance_matrix(ty)
    nx, ny = smallest_nonsingleton_measure(tx), smallest_nonsingleton_measure(ty)

    with np.errstate(divide="ignore", invalid="ignore"):
        # rows: x varies, y fixed at p
        dx_row = (rx[:, :, None] * ny[None, None, :]) ** alpha          # (i, j, p)
        num = np.abs(f[:, None, :] - f[None, :, :])
        row = np.nanmax(np.where(dx_row > 0, num / dx_row, 0.0))
        dy_col = (nx[:, None, None] * ry[None, :, :]) ** alpha          # (i, p, q)
        num = np.abs(f[:, :, None] - f[:, None, :])
        col = np.nanmax(np.where(dy_col > 0, num / dy_col, 0.0))

        # mixed: rho_X(i, j)^alpha * rho_Y(p, q)^alpha
        ax, ay = rx**alpha, ry**alpha
        mixed = 0.0
        for i in range(tx.n):
            D = f[i][None, :] - f                                          # (j, p)
            second = np.abs(D[:, :, None] - D[:, None, :])                 # (j, p, q)
            den = ax[i][:, None, None] * ay[None, :, :]
            ratio = np.where(den > 0, second / den, 0.0)
            mixed = max(mixed, float(np.max(ratio)))
    return float(mixed), float(row), float(col)


# --- wavelet norms -----------------------------------------------------------

def _is_dyadic(basis) -> bool:
    if isinstance(basis, TensorBasis):
        return basis.bx.tree.is_balanced_dyadic and basis.by.tree.is_balanced_dyadic
    return basis.tree.is_balanced_dyadic


def norm_form(basis) -> str:
    return "dyadic" if _is_dyadic(basis) else "node-size"


def wavelet_holder_norm(f, basis, alpha: float, doubled: bool = False) -> float:
    """``sup |<f, psi>| / size^(alpha + 1/2)`` over all wavelets (``psi x psi`` in 2D).

    With ``doubled`` the exponent becomes ``2 alpha + 1/2``.  Coefficients
    below ``ZERO_COEF`` count as zero, as in the decay fits.
    """
    table = wavelet_coefficient_table(f, basis)
    if not len(table):
        return 0.0
    e = (2 * alpha if doubled else alpha) + 0.5
    c = np.abs(table.values)
    c[c < ZERO_COEF] = 0.0
    return float(np.max(c / table.fractions**e))


# --- decay tables ------------------------------------------------------------

@dataclass
class DecayRow:
    scale: tuple[int, ...]
    count: int
    max_abs_coef: float
    bound: float
    ratio: float


@dataclass
class DecayTable:
    """Per-scale coefficient maxima and a log2-linear fit against scale.

    ``slope`` is the OLS slope of ``log2(max_abs_coef)`` versus ``l`` (1D) or
    ``l + s`` (2D); ``status`` is ``"ok"``, ``"insufficient"`` (fewer than
    ``min_scales`` usable scales) or ``"degenerate"`` (all coefficients zero).
    """

    exponent: float
    rows: list[DecayRow]
    slope: float = float("nan")
    intercept: float = float("nan")
    residual: float = float("nan")
    n_fit: int = 0
    status: str = "degenerate"

    @property
    def decay_exponent(self) -> float:
        return -self.slope

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rows"] = [{**r, "scale": list(r["scale"])} for r in d["rows"]]
        return d

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scale", "count", "max_coef", "bound", "ratio"])
            for r in self.rows:
                w.writerow(["/".join(map(str, r.scale)), r.count, _g(r.max_abs_coef), _g(r.bound), _g(r.ratio)])


def _g(x: float) -> str:
    return format(float(x), ".17g")


def fit_log2_slope(x, y, floor: float = ZERO_COEF, min_points: int = 3, mask=None):
    """OLS fit of ``log2(y)`` on ``x`` ignoring ``y < floor`` and entries where ``mask`` is false.

    Returns ``(slope, intercept, rms_residual, n_used, status)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = y >= floor
    if mask is not None:
        keep &= np.asarray(mask, dtype=bool)
    n = int(keep.sum())
    if n == 0:
        return float("nan"), float("nan"), float("nan"), 0, "degenerate"
    if n < min_points or np.ptp(x[keep]) == 0:
        return float("nan"), float("nan"), float("nan"), n, "insufficient"
    xs, ys = x[keep], np.log2(y[keep])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    return float(slope), float(intercept), resid, n, "ok"


def decay_table(
    coeffs: CoefficientTable, exponent: float, min_scales: int = 3, min_count: int = MIN_FIT_COUNT
) -> DecayTable:
    """Per-scale maxima of ``|coef|`` and ratios against ``size^exponent``.

    Every scale gets a row, but the slope fit only uses scales holding at
    least ``min_count`` coefficients: the maximum of a handful of random
    amplitudes is biased low, which tilts the fitted slope at coarse scales.
    """
    scales = coeffs.scales().reshape(len(coeffs), -1)
    groups, inverse = np.unique(scales, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    absval = np.abs(coeffs.values)
    rows = []
    for g, key in enumerate(groups):
        sel = inverse == g
        bounds = coeffs.fractions[sel] ** exponent
        rows.append(DecayRow(tuple(int(v) for v in key), int(sel.sum()), float(absval[sel].max()),
                             float(bounds.max()), float(np.max(absval[sel] / bounds))))
    x = [sum(r.scale) for r in rows]
    y = [r.max_abs_coef for r in rows]
    mask = [r.count >= min_count for r in rows]
    slope, icpt, resid, n, status = fit_log2_slope(x, y, min_points=min_scales, mask=mask)
    return DecayTable(exponent, rows, slope, icpt, resid, n, status)


def wavelet_decay_table(f, basis, exponent: float = 0.5) -> DecayTable:
    return decay_table(wavelet_coefficient_table(f, basis), exponent)


# --- synthesis ---------------------------------------------------------------

def _amplitudes(rng: np.random.Generator, size, kind: str) -> np.ndarray:
    if kind == "uniform":
        return rng.uniform(-1.0, 1.0, size)
    if kind == "rademacher":
        return rng.choice([-1.0, 1.0], size)
    raise ValueError(f"unknown amplitude distribution {kind!r}")


def _check_alpha(alpha):
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")


def synthesize_holder_signal(
    tree: PartitionTree | TreeBasis, alpha: float, seed: int, amplitude: str = "uniform"
) -> np.ndarray:
    """Signal whose wavelet coefficients are ``u * size^(alpha + 1/2)``, ``|u| <= 1``.

    The constant component is zero.
    """
    _check_alpha(alpha)
    basis = tree if isinstance(tree, TreeBasis) else build_tree_basis(tree)
    rng = np.random.default_rng(seed)
    c = np.zeros(len(basis))
    w = basis.kinds == "wavelet"
    c[w] = _amplitudes(rng, int(w.sum()), amplitude) * basis.node_fractions[w] ** (alpha + 0.5)
    return synthesize(c, basis)


def synthesize_holder_signal_2d(
    trees, alpha: float, seed: int, amplitude: str = "uniform"
) -> np.ndarray:
    """2D analogue over ``psi x psi`` elements; every other tensor coefficient is zero."""
    _check_alpha(alpha)
    if isinstance(trees, TensorBasis):
        tb = trees
    else:
        bx, by = (t if isinstance(t, TreeBasis) else build_tree_basis(t) for t in trees)
        tb = build_tensor_basis(bx, by)
    rng = np.random.default_rng(seed)
    wx = tb.bx.kinds == "wavelet"
    wy = tb.by.kinds == "wavelet"
    c = np.zeros(tb.shape)
    frac = np.outer(tb.bx.node_fractions[wx], tb.by.node_fractions[wy])
    c[np.ix_(wx, wy)] = _amplitudes(rng, frac.shape, amplitude) * frac ** (alpha + 0.5)
    return synthesize(c, tb)


# --- reports -----------------------------------------------------------------

@dataclass
class HolderReport:
    alpha: float
    pairwise_seminorm: float | tuple[float, float, float] | None
    wavelet_norm: float
    doubled_wavelet_norm: float
    form: str
    decay: DecayTable
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        ps = self.pairwise_seminorm
        return {
            "alpha": self.alpha,
            "pairwise_seminorm": list(ps) if isinstance(ps, tuple) else ps,
            "wavelet_norm": self.wavelet_norm,
            "doubled_wavelet_norm": self.doubled_wavelet_norm,
            "form": self.form,
            "decay": self.decay.to_dict(),
            "notes": self.notes,
        }

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, default=_jsonable))


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(type(x))


def holder_report(f, basis, alpha: float, pairwise: bool = True) -> HolderReport:
    f = np.asarray(f, dtype=float)
    notes = []
    form = norm_form(basis)
    if form == "node-size":
        notes.append("tree is not balanced dyadic; node-size bounds used in place of 2^-l")
    ps = None
    if pairwise:
        try:
            if isinstance(basis, TensorBasis):
                ps = pairwise_holder_seminorm_2d(f, (basis.bx.tree, basis.by.tree), alpha)
            else:
                ps = pairwise_holder_seminorm(f, basis.tree, alpha)
        except (TooLarge, TooSmall) as exc:
            notes.append(f"pairwise seminorm skipped: {exc}")
    table = wavelet_coefficient_table(f, basis)
    decay = decay_table(table, alpha + 0.5)
    if decay.status != "ok":
        notes.append(f"decay fit {decay.status}")
    return HolderReport(
        alpha, ps,
        wavelet_holder_norm(f, basis, alpha),
        wavelet_holder_norm(f, basis, alpha, doubled=True),
        form, decay, notes,
    )

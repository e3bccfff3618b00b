"""Hierarchical (tensor) paraproducts of compositions ``A(f)``.

1D::

    A~(f) = sum_l A'(P^l f) Q^l f,            Delta = A(f) - A~(f)

2D (scales ``l`` on X, ``s`` on Y)::

    A~(f) = sum_{l,s} A'(P^l P^s f) Q^l Q^s f + A''(P^l P^s f) Q^l P^s f P^l Q^s f

Scale indexing follows :mod:`treepara.multiscale_ops` (backward differences,
``Q^l = P^l - P^{l-1}``).  By default the coarsest contributions, which the
sums above do not produce, stay inside ``Delta``: ``A(E_0 f)`` in 1D and
``A(E^X_0 f) + A(E^Y_0 f) - A(E^X_0 E^Y_0 f)`` in 2D.  ``include_coarse=True``
moves them into ``A~``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import LevelOutOfRange, MissingDerivative, NotC2, NotDyadic, SizeMismatch
from .haar_basis import build_tensor_basis, build_tree_basis
from .holder import DecayTable, fit_log2_slope, wavelet_decay_table, wavelet_holder_norm
from .multiscale_ops import ScaleOperatorStack

# --- nonlinearities ----------------------------------------------------------

EXP_CLAMP = 50.0


@dataclass(frozen=True)
class Nonlinearity:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    d1: Callable[[np.ndarray], np.ndarray] | None
    d2: Callable[[np.ndarray], np.ndarray] | None = None
    smoothness: str = "C2"

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    @property
    def is_c2(self) -> bool:
        return self.smoothness == "C2" and self.d2 is not None

    def require_c1(self):
        if self.d1 is None:
            raise MissingDerivative(f"{self.name} has no first derivative")

    def require_c2(self):
        self.require_c1()
        if not self.is_c2:
            raise NotC2(f"{self.name} is tagged {self.smoothness}; the 2D paraproduct needs C2")


def _sech2(t):
    return 1.0 / np.cosh(np.clip(t, -350, 350)) ** 2


def _sigmoid(t):
    return 0.5 * (1.0 + np.tanh(0.5 * t))


def _clamped_exp(t):
    return np.exp(np.clip(t, -EXP_CLAMP, EXP_CLAMP))


NONLINEARITIES: dict[str, Nonlinearity] = {
    nl.name: nl
    for nl in [
        Nonlinearity("identity", lambda t: np.array(t, dtype=float), np.ones_like, np.zeros_like),
        Nonlinearity("square", lambda t: t**2, lambda t: 2 * t, lambda t: np.full_like(t, 2.0)),
        Nonlinearity("cube", lambda t: t**3, lambda t: 3 * t**2, lambda t: 6 * t),
        Nonlinearity("sin", np.sin, np.cos, lambda t: -np.sin(t)),
        # exp with its argument clamped to |t| <= 50; derivatives are those of exp inside the clamp
        Nonlinearity("exp_clamped", _clamped_exp, _clamped_exp, _clamped_exp),
        Nonlinearity("tanh", np.tanh, _sech2, lambda t: -2 * np.tanh(t) * _sech2(t)),
        Nonlinearity("softplus", lambda t: np.logaddexp(0.0, t), _sigmoid,
                     lambda t: _sigmoid(t) * (1 - _sigmoid(t))),
        Nonlinearity("abs_pow_1_5", lambda t: np.abs(t) ** 1.5,
                     lambda t: 1.5 * np.sign(t) * np.sqrt(np.abs(t)), None, "C1"),
    ]
}


def get_nonlinearity(name: str | Nonlinearity) -> Nonlinearity:
    if isinstance(name, Nonlinearity):
        return name
    try:
        return NONLINEARITIES[name]
    except KeyError:
        raise KeyError(f"unknown nonlinearity {name!r}; choose from {sorted(NONLINEARITIES)}") from None


def derivative_error(A: Nonlinearity, probe=None, h: float = 1e-5) -> tuple[float, float]:
    """Max relative central-difference error of ``A'`` and (if present) ``A''``."""
    t = np.linspace(-3, 3, 61) if probe is None else np.asarray(probe, dtype=float)
    e1 = e2 = 0.0
    if A.d1 is not None:
        fd = (A(t + h) - A(t - h)) / (2 * h)
        e1 = float(np.max(np.abs(fd - A.d1(t)) / (1 + np.abs(A.d1(t)))))
    if A.d2 is not None:
        fd = (A.d1(t + h) - A.d1(t - h)) / (2 * h)
        e2 = float(np.max(np.abs(fd - A.d2(t)) / (1 + np.abs(A.d2(t)))))
    return e1, e2


# --- 1D ----------------------------------------------------------------------

def _basis_1d(stack):
    return build_tree_basis(stack.tree)


@dataclass(eq=False)
class Decomposition1D:
    f: np.ndarray
    nonlinearity: Nonlinearity
    approx: np.ndarray
    residual: np.ndarray
    terms: dict[int, np.ndarray]
    include_coarse: bool
    stack: ScaleOperatorStack = field(repr=False)

    @cached_property
    def basis(self):
        return _basis_1d(self.stack)

    @cached_property
    def f_decay(self) -> DecayTable:
        return wavelet_decay_table(self.f, self.basis)

    @cached_property
    def residual_decay(self) -> DecayTable:
        return wavelet_decay_table(self.residual, self.basis)


def approx_1d(
    stack: ScaleOperatorStack,
    f,
    A: str | Nonlinearity,
    max_level: int | None = None,
    include_coarse: bool = False,
) -> Decomposition1D:
    """Paraproduct ``A(f) = A~ + Delta`` over scales ``0..max_level`` (default all)."""
    A = get_nonlinearity(A)
    A.require_c1()
    f = np.asarray(f, dtype=float)
    if f.shape != (stack.n,):
        raise SizeMismatch(f"signal shape {f.shape} != ({stack.n},)")
    top = stack.depth - 1 if max_level is None else max_level
    if top > stack.depth - 1:
        raise LevelOutOfRange(f"max_level {top} > {stack.depth - 1}")
    terms = {}
    approx = np.zeros_like(f)
    for l in range(top + 1):
        terms[l] = A.d1(stack.P(l, f)) * stack.Q(l, f)
        approx = approx + terms[l]
    if include_coarse:
        approx = approx + A(stack.P(-1, f))
    return Decomposition1D(f, A, approx, A(f) - approx, terms, include_coarse, stack)


# --- 2D ----------------------------------------------------------------------

def _tensor_P(stacks, l, s, f):
    sx, sy = stacks
    return sy.P(s, sx.P(l, f, axis=0), axis=1)


def coarse_boundary(stacks, f, A: Nonlinearity) -> np.ndarray:
    """``A(E^X_0 f) + A(E^Y_0 f) - A(E^X_0 E^Y_0 f)``, the part no (l, s) term produces."""
    sx, sy = stacks
    Lx, Ly = sx.depth - 1, sy.depth - 1
    return A(_tensor_P(stacks, -1, Ly, f)) + A(_tensor_P(stacks, Lx, -1, f)) - A(_tensor_P(stacks, -1, -1, f))


@dataclass(eq=False)
class Decomposition2D:
    f: np.ndarray
    nonlinearity: Nonlinearity
    approx: np.ndarray
    residual: np.ndarray
    terms: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]]
    include_coarse: bool
    stacks: tuple[ScaleOperatorStack, ScaleOperatorStack] = field(repr=False)

    @cached_property
    def basis(self):
        sx, sy = self.stacks
        return build_tensor_basis(build_tree_basis(sx.tree), build_tree_basis(sy.tree))

    @cached_property
    def f_decay(self) -> DecayTable:
        return wavelet_decay_table(self.f, self.basis)

    @cached_property
    def residual_decay(self) -> DecayTable:
        return wavelet_decay_table(self.residual, self.basis)


def _check_2d(stacks, f):
    sx, sy = stacks
    f = np.asarray(f, dtype=float)
    if f.shape != (sx.n, sy.n):
        raise SizeMismatch(f"signal shape {f.shape} != ({sx.n}, {sy.n})")
    return f


def approx_2d(stacks, f, A: str | Nonlinearity, include_coarse: bool = False) -> Decomposition2D:
    A = get_nonlinearity(A)
    A.require_c2()
    f = _check_2d(stacks, f)
    sx, sy = stacks
    terms = {}
    approx = np.zeros_like(f)
    for l in range(sx.depth):
        qx = sx.Q(l, f, axis=0)
        px = sx.P(l, f, axis=0)
        for s in range(sy.depth):
            pp = sy.P(s, px, axis=1)
            qq = sy.Q(s, qx, axis=1)
            qp = sy.P(s, qx, axis=1)
            pq = sy.Q(s, px, axis=1)
            first = A.d1(pp) * qq
            second = A.d2(pp) * qp * pq
            terms[(l, s)] = (first, second)
            approx = approx + first + second
    if include_coarse:
        approx = approx + coarse_boundary(stacks, f, A)
    return Decomposition2D(f, A, approx, A(f) - approx, terms, include_coarse, tuple(stacks))


# --- interpolation and the integral form of the residual ---------------------

@dataclass(frozen=True)
class InterpolationContext:
    """The four corner views a bilinear path runs between.

    ``base`` is where the path starts (``mu = omega = 0``); ``x_next`` and
    ``y_next`` are one step away along X and Y, ``xy_next`` one step along both.
    """

    base: np.ndarray
    x_next: np.ndarray
    y_next: np.ndarray
    xy_next: np.ndarray


def forward_context(stacks, f, l: int, s: int) -> InterpolationContext:
    """Corners ``P^l P^s``, ``P^{l+1} P^s``, ``P^l P^{s+1}``, ``P^{l+1} P^{s+1}``.

    ``l`` and ``s`` may be ``-1`` (global mean) up to ``depth - 2``.
    """
    sx, sy = stacks
    if not (-1 <= l <= sx.depth - 2 and -1 <= s <= sy.depth - 2):
        raise LevelOutOfRange(f"(l, s) = ({l}, {s}) has no finer neighbour")
    f = _check_2d(stacks, f)
    return InterpolationContext(
        _tensor_P(stacks, l, s, f), _tensor_P(stacks, l + 1, s, f),
        _tensor_P(stacks, l, s + 1, f), _tensor_P(stacks, l + 1, s + 1, f),
    )


def backward_context(stacks, f, l: int, s: int) -> InterpolationContext:
    """Corners starting at ``P^l P^s`` and stepping to the coarser scales ``l-1``, ``s-1``.

    This orientation puts the path start where ``A~`` evaluates ``A'`` and
    ``A''``, so the integrand at ``mu = omega = 0`` is exactly the ``(l, s)``
    term of ``A~``.
    """
    sx, sy = stacks
    if not (0 <= l <= sx.depth - 1 and 0 <= s <= sy.depth - 1):
        raise LevelOutOfRange(f"(l, s) = ({l}, {s}) out of range")
    f = _check_2d(stacks, f)
    return InterpolationContext(
        _tensor_P(stacks, l, s, f), _tensor_P(stacks, l - 1, s, f),
        _tensor_P(stacks, l, s - 1, f), _tensor_P(stacks, l - 1, s - 1, f),
    )


def interpolation_h(ctx: InterpolationContext, mu: float, omega: float) -> np.ndarray:
    if not (0.0 <= mu <= 1.0 and 0.0 <= omega <= 1.0):
        raise ValueError("mu and omega must lie in [0, 1]")
    b, x, y, xy = ctx.base, ctx.x_next, ctx.y_next, ctx.xy_next
    return omega * (x - b) + mu * ((y + omega * (xy - y)) - (b + omega * (x - b)))


@dataclass(frozen=True)
class ResidualTerms:
    """Increments of the bilinear path from ``ctx.base``.

    ``v1`` is the mixed increment (``Q^l Q^s f`` for a backward context);
    ``x_increment`` / ``y_increment`` are the single-axis steps, which for a
    backward context are ``-Q^l P^s f`` and ``-P^l Q^s f``.
    """

    context: InterpolationContext
    v1: np.ndarray
    x_increment: np.ndarray
    y_increment: np.ndarray

    def v2(self, mu: float, omega: float) -> np.ndarray:
        return (self.y_increment + omega * self.v1) * (self.x_increment + mu * self.v1)

    @property
    def v2_tilde(self) -> np.ndarray:
        return self.x_increment * self.y_increment


def residual_terms(ctx: InterpolationContext) -> ResidualTerms:
    b, x, y, xy = ctx.base, ctx.x_next, ctx.y_next, ctx.xy_next
    return ResidualTerms(ctx, xy - x - y + b, x - b, y - b)


def _gauss_01(order: int):
    nodes, weights = leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _integrand_parts(A: Nonlinearity, terms: ResidualTerms, mu: float, omega: float):
    ctx = terms.context
    h = interpolation_h(ctx, mu, omega)
    base = ctx.base
    return (
        A.d1(base + h) * terms.v1,
        A.d1(base) * terms.v1,
        A.d2(base + h) * terms.v2(mu, omega),
        A.d2(base) * terms.v2_tilde,
    )


def scale_residual(stacks, f, A: Nonlinearity, l: int, s: int, quadrature_order: int = 8) -> np.ndarray:
    """Double integral of the ``(l, s)`` residual integrand by tensor Gauss-Legendre."""
    terms = residual_terms(backward_context(stacks, f, l, s))
    nodes, weights = _gauss_01(quadrature_order)
    out = np.zeros_like(terms.v1)
    for mu, wm in zip(nodes, weights):
        for om, wo in zip(nodes, weights):
            t1, t2, t3, t4 = _integrand_parts(A, terms, mu, om)
            out += wm * wo * (t1 - t2 + t3 - t4)
    return out


def residual_integral_2d(stacks, f, A: str | Nonlinearity, quadrature_order: int = 8) -> np.ndarray:
    """``sum_{l,s}`` of the integral-form residual.

    Equals ``approx_2d(..., include_coarse=True).residual``; the coarse boundary
    terms are not part of the integral form.
    """
    A = get_nonlinearity(A)
    A.require_c2()
    if quadrature_order < 2:
        raise ValueError("quadrature_order must be at least 2")
    f = _check_2d(stacks, f)
    sx, sy = stacks
    out = np.zeros_like(f)
    for l in range(sx.depth):
        for s in range(sy.depth):
            out += scale_residual(stacks, f, A, l, s, quadrature_order)
    return out


@dataclass
class TermBoundRow:
    l: int
    s: int
    first: float
    second: float
    third: float
    fourth: float
    total: float


@dataclass
class TermBoundTable:
    """Per-``(l, s)`` sup norms of the four residual integrand terms.

    ``total`` is the sup norm of the integrated ``(l, s)`` residual
    contribution; ``slope`` fits ``log2(total)`` against ``l + s``.
    """

    alpha: float
    rows: list[TermBoundRow]
    slope: float
    intercept: float
    status: str

    @property
    def target_slope(self) -> float:
        return -(2 * self.alpha + 1)


def residual_term_bounds(stacks, f, A: str | Nonlinearity, alpha: float, quadrature_order: int = 8) -> TermBoundTable:
    A = get_nonlinearity(A)
    A.require_c2()
    sx, sy = stacks
    if not (sx.tree.is_balanced_dyadic and sy.tree.is_balanced_dyadic):
        raise NotDyadic("term bounds are indexed by 2^-(l+s); both trees must be balanced dyadic")
    f = _check_2d(stacks, f)
    nodes, weights = _gauss_01(quadrature_order)
    rows = []
    for l in range(sx.depth):
        for s in range(sy.depth):
            terms = residual_terms(backward_context(stacks, f, l, s))
            sup = np.zeros(4)
            integral = np.zeros_like(f)
            for mu, wm in zip(nodes, weights):
                for om, wo in zip(nodes, weights):
                    parts = _integrand_parts(A, terms, mu, om)
                    sup = np.maximum(sup, [np.max(np.abs(p)) for p in parts])
                    integral += wm * wo * (parts[0] - parts[1] + parts[2] - parts[3])
            rows.append(TermBoundRow(l, s, *map(float, sup), float(np.max(np.abs(integral)))))
    slope, icpt, _, _, status = fit_log2_slope([r.l + r.s for r in rows], [r.total for r in rows])
    return TermBoundTable(alpha, rows, slope, icpt, status)


# --- verification ------------------------------------------------------------

@dataclass
class GainThresholds:
    min_gain_factor: float = 0.8      # residual exponent - f exponent >= factor * alpha
    residual_slope_tol: float = 0.2   # residual exponent >= 2 alpha + 1/2 - tol


@dataclass
class GainReport:
    alpha: float
    f_slope: float
    residual_slope: float
    f_status: str
    residual_status: str
    gain: float
    norm_ratio: float
    f_norm: float
    residual_doubled_norm: float
    checks: dict[str, bool]
    passed: bool

    def to_dict(self) -> dict:
        return {k: (v if not isinstance(v, float) or np.isfinite(v) else None)
                for k, v in self.__dict__.items()}


def verify_residual_gain(decomp, alpha: float, thresholds: GainThresholds | None = None) -> GainReport:
    """Compare wavelet decay of ``f`` and ``Delta`` and the norm ratio ``||Delta||_{2a} / ||f||_a``."""
    th = thresholds or GainThresholds()
    basis = decomp.basis
    fd, rd = decomp.f_decay, decomp.residual_decay
    f_norm = wavelet_holder_norm(decomp.f, basis, alpha)
    r_norm = wavelet_holder_norm(decomp.residual, basis, alpha, doubled=True)
    ratio = r_norm / f_norm if f_norm > 0 else (0.0 if r_norm == 0 else float("inf"))
    residual_vanishes = rd.status == "degenerate"
    gain = rd.decay_exponent - fd.decay_exponent
    checks = {}
    if residual_vanishes:
        checks["residual_vanishes"] = True
    else:
        checks["residual_slope"] = bool(rd.status == "ok" and rd.decay_exponent >= 2 * alpha + 0.5 - th.residual_slope_tol)
        checks["gain"] = bool(rd.status == "ok" and fd.status == "ok" and gain >= th.min_gain_factor * alpha)
    return GainReport(
        alpha, fd.slope, rd.slope, fd.status, rd.status, float(gain), float(ratio),
        f_norm, r_norm, checks, all(checks.values()),
    )

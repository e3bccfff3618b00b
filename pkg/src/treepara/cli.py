"""Command-line front end.

Subcommands ``tree``, ``transform``, ``para``, ``verify``, ``synth`` and
``report`` each read a :class:`PipelineConfig` assembled from built-in
defaults, an optional JSON ``--config`` file and command-line flags (flags
win).  Exit codes: 0 success or pass, 1 verification failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import MissingCoordinates, PartitionViolation, TreeParaError
from .haar_basis import analyze, build_tensor_basis, build_tree_basis, write_coefficients_csv
from .holder import (
    decay_table,
    holder_report,
    synthesize_holder_signal,
    synthesize_holder_signal_2d,
    wavelet_holder_norm,
)
from .io import (
    read_matrix_csv,
    read_signal_csv,
    write_coefficient_table_csv,
    write_long_matrix_csv,
    write_matrix_csv,
    write_signal_csv,
)
from .multiscale_ops import ScaleOperatorStack, wavelet_coefficient_table
from .paraproduct import (
    NONLINEARITIES,
    GainThresholds,
    approx_1d,
    approx_2d,
    get_nonlinearity,
    residual_term_bounds,
    verify_residual_gain,
)
from .tree_core import (
    LINKAGES,
    MEASURE_MODES,
    build_balanced_dyadic_tree,
    build_tree_from_clustering,
    dump_tree_spec,
    load_tree_spec,
    read_pointset_csv,
    validate_partition_tree,
)

log = logging.getLogger("treepara")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
COMMANDS = ("tree", "transform", "para", "verify", "synth", "report")


class UsageError(TreeParaError):
    pass


@dataclass
class PipelineConfig:
    command: str = "tree"
    points: str | None = None
    points_y: str | None = None
    signal: str | None = None
    matrix: str | None = None
    n: int | None = None
    n_y: int | None = None
    dims: int = 1
    tree: str = "dyadic"
    tree_y: str | None = None
    linkage: str = "average"
    branching_cap: int = 4
    measure: str = "normalized"
    alpha: float = 0.3
    nonlinearity: str = "tanh"
    include_coarse: bool = False
    quad_order: int = 8
    seed: int = 0
    amplitude: str = "uniform"
    threads: int | None = None
    out: str = "."
    min_gain_factor: float = 0.8
    residual_slope_tol: float = 0.2

    def validate(self) -> "PipelineConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not (isinstance(self.alpha, (int, float)) and 0 < self.alpha < 0.5):
            raise UsageError(f"alpha must lie in (0, 1/2), got {self.alpha!r}")
        if self.measure not in MEASURE_MODES:
            raise UsageError(f"measure must be one of {MEASURE_MODES}")
        if self.linkage not in LINKAGES:
            raise UsageError(f"linkage must be one of {LINKAGES}")
        if self.nonlinearity not in NONLINEARITIES:
            raise UsageError(f"unknown nonlinearity {self.nonlinearity!r}; choose from {sorted(NONLINEARITIES)}")
        if self.dims not in (1, 2):
            raise UsageError("dims must be 1 or 2")
        if self.quad_order < 2:
            raise UsageError("quad-order must be at least 2")
        if self.signal and self.matrix:
            raise UsageError("give either --signal or --matrix, not both")
        for src in (self.tree, self.tree_y):
            if src is not None and not (src in ("dyadic", "cluster") or src.startswith("spec:")):
                raise UsageError(f"tree source must be dyadic, cluster or spec:PATH, got {src!r}")
        paths = [self.points, self.points_y, self.signal, self.matrix]
        paths += [s[5:] for s in (self.tree, self.tree_y) if s and s.startswith("spec:")]
        for p in paths:
            if p is not None and not Path(p).is_file():
                raise UsageError(f"input file not found: {p}")
        if self.threads is None:
            self.threads = os.cpu_count() or 1
        return self

    @property
    def is_2d(self) -> bool:
        return self.matrix is not None or (self.signal is None and self.dims == 2)


# --- argument parsing --------------------------------------------------------

def _alpha(text: str) -> float:
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < a < 0.5:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1/2)")
    return a


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file of option values; flags override it")
    common.add_argument("--points", help="point CSV (id,x0,x1,...) for the X axis")
    common.add_argument("--points-y", help="point CSV for the Y axis (2D, cluster trees)")
    common.add_argument("--signal", help="1D signal CSV (id,value)")
    common.add_argument("--matrix", help="2D signal CSV with header row/column ids")
    common.add_argument("--n", type=_positive, help="size of the X axis when no input fixes it")
    common.add_argument("--n-y", type=_positive, help="size of the Y axis (defaults to --n)")
    common.add_argument("--dims", type=int, choices=(1, 2), help="dimension for synth")
    common.add_argument("--tree", help="dyadic | cluster | spec:PATH")
    common.add_argument("--tree-y", help="tree source for the Y axis (defaults to --tree)")
    common.add_argument("--linkage", choices=LINKAGES)
    common.add_argument("--branching-cap", type=int)
    common.add_argument("--measure", choices=MEASURE_MODES)
    common.add_argument("--alpha", type=_alpha)
    common.add_argument("--nonlinearity", choices=sorted(NONLINEARITIES))
    common.add_argument("--include-coarse", action="store_true")
    common.add_argument("--quad-order", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--amplitude", choices=("uniform", "rademacher"))
    common.add_argument("--threads", type=_positive, help="recorded in outputs; work runs on one thread")
    common.add_argument("--out", help="output directory")
    common.add_argument("--min-gain-factor", type=float)
    common.add_argument("--residual-slope-tol", type=float)

    parser = argparse.ArgumentParser(prog="treepara", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "tree": "build or load a partition tree and validate it",
        "transform": "Haar-like coefficients and per-scale decay",
        "para": "paraproduct decomposition A(f) = A~ + Delta",
        "verify": "decomposition plus regularity-gain checks (exit 1 on failure)",
        "synth": "synthesize a Holder-alpha test signal",
        "report": "Holder norms and decay fit of a signal",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def load_config(argv=None) -> PipelineConfig:
    """Defaults, then the ``--config`` file, then flags."""
    ns = vars(build_parser().parse_args(argv))
    values = {}
    cfg_path = ns.pop("config", None)
    if cfg_path is not None:
        try:
            doc = json.loads(Path(cfg_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {cfg_path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(PipelineConfig)}
        for key, v in doc.items():
            key = key.replace("-", "_")
            if key not in known or key == "command":
                raise UsageError(f"unknown config key {key!r}")
            values[key] = v
    values.update(ns)
    return PipelineConfig(**values).validate()


# --- output helpers ----------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x) if math.isfinite(x) else None
    return x


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def _outdir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_meta(cfg: PipelineConfig) -> dict:
    d = asdict(cfg)
    d.pop("out")
    return d


# --- tree and signal assembly ------------------------------------------------

def _make_tree(cfg: PipelineConfig, source: str, n: int | None, points_path: str | None):
    if source.startswith("spec:"):
        tree = load_tree_spec(Path(source[5:]), cfg.measure)
        if n is not None and tree.n != n:
            raise UsageError(f"tree spec has N={tree.n} but the input has N={n}")
        return tree
    if source == "cluster":
        if points_path is None:
            raise MissingCoordinates("cluster trees need a --points CSV with coordinates")
        pts = read_pointset_csv(points_path)
        if n is not None and pts.n != n:
            raise UsageError(f"point set has N={pts.n} but the input has N={n}")
        return build_tree_from_clustering(pts, cfg.linkage, cfg.branching_cap, cfg.measure)
    if n is None and points_path is not None:
        n = read_pointset_csv(points_path).n
    if n is None:
        raise UsageError("dyadic trees need a size: give --n or an input signal")
    return build_balanced_dyadic_tree(n, cfg.measure)


def _load_signal(cfg: PipelineConfig) -> np.ndarray:
    if cfg.matrix is not None:
        return read_matrix_csv(cfg.matrix)
    if cfg.signal is not None:
        return read_signal_csv(cfg.signal)
    raise UsageError("this command needs --signal or --matrix")


def _trees_for(cfg: PipelineConfig, shape: tuple[int, ...] | None):
    if shape is None:
        shape = (cfg.n,) if cfg.dims == 1 else (cfg.n, cfg.n_y or cfg.n)
    tx = _make_tree(cfg, cfg.tree, shape[0], cfg.points)
    if len(shape) == 1:
        return (tx,)
    ty = _make_tree(cfg, cfg.tree_y or cfg.tree, shape[1], cfg.points_y)
    return tx, ty


def _basis(trees):
    if len(trees) == 1:
        return build_tree_basis(trees[0])
    return build_tensor_basis(build_tree_basis(trees[0]), build_tree_basis(trees[1]))


# --- commands ----------------------------------------------------------------

def cmd_tree(cfg: PipelineConfig) -> int:
    out = _outdir(cfg)
    n = cfg.n
    if n is None and cfg.signal is not None:
        n = read_signal_csv(cfg.signal).size
    try:
        tree = _make_tree(cfg, cfg.tree, n, cfg.points)
    except PartitionViolation as exc:
        write_json(out / "validation.json", exc.report.to_dict())
        for v in exc.report.violations:
            print(f"violation: {v}", file=sys.stderr)
        raise
    report = validate_partition_tree(tree)
    spec = dump_tree_spec(tree)
    spec["measure_mode"] = tree.measure_mode
    write_json(out / "tree.json", spec)
    write_json(out / "validation.json", {**report.to_dict(), "depth": tree.depth,
                                         "n_levels": len(tree.levels),
                                         "diagnostics": list(tree.diagnostics)})
    log.info("tree with %d levels written to %s", len(tree.levels), out)
    return EXIT_OK if report.ok else EXIT_USAGE


def cmd_transform(cfg: PipelineConfig) -> int:
    out = _outdir(cfg)
    f = _load_signal(cfg)
    trees = _trees_for(cfg, f.shape)
    basis = _basis(trees)
    if f.ndim == 1:
        write_coefficients_csv(analyze(f, basis), basis, out / "coefficients.csv")
    else:
        write_coefficient_table_csv(out / "coefficients.csv", [wavelet_coefficient_table(f, basis)])
    table = decay_table(wavelet_coefficient_table(f, basis), cfg.alpha + 0.5)
    table.write_csv(out / "decay.csv")
    return EXIT_OK


def _decompose(cfg: PipelineConfig):
    f = _load_signal(cfg)
    A = get_nonlinearity(cfg.nonlinearity)
    if f.ndim == 2:
        A.require_c2()
    trees = _trees_for(cfg, f.shape)
    stacks = tuple(ScaleOperatorStack(t) for t in trees)
    if f.ndim == 1:
        return f, stacks, approx_1d(stacks[0], f, A, include_coarse=cfg.include_coarse)
    return f, stacks, approx_2d(stacks, f, A, include_coarse=cfg.include_coarse)


def _write_decomposition(cfg: PipelineConfig, f, stacks, dec, gain) -> dict:
    out = _outdir(cfg)
    A = dec.nonlinearity
    cols = {"f": f, "A_f": A(f), "approx": dec.approx, "residual": dec.residual}
    if f.ndim == 1:
        write_signal_csv(out / "signals.csv", None, cols)
        with (out / "terms.csv").open("w") as fh:
            fh.write("l,sup_norm,l2_norm\n")
            for l, t in dec.terms.items():
                w = stacks[0].tree.element_measure
                fh.write(f"{l},{float(np.max(np.abs(t))):.17g},{float(np.sqrt(np.sum(t**2) * w)):.17g}\n")
    else:
        write_long_matrix_csv(out / "signals.csv", cols)
        with (out / "terms.csv").open("w") as fh:
            fh.write("l,s,first_sup,second_sup,sum_sup\n")
            for (l, s), (a, b) in dec.terms.items():
                fh.write(f"{l},{s},{float(np.max(np.abs(a))):.17g},{float(np.max(np.abs(b))):.17g},"
                         f"{float(np.max(np.abs(a + b))):.17g}\n")
    r = dec.residual
    manifest = {
        "nonlinearity": A.name,
        "alpha": cfg.alpha,
        "include_coarse": cfg.include_coarse,
        "shape": list(f.shape),
        "exactness_error": float(np.max(np.abs(dec.approx + dec.residual - A(f)))),
        "residual_range": float(np.max(r) - np.min(r)),
        "residual_constant": bool(np.max(r) - np.min(r) <= 1e-12 * max(1.0, float(np.max(np.abs(r))))),
        "norms": {
            "f_holder": gain.f_norm,
            "residual_holder": wavelet_holder_norm(r, dec.basis, cfg.alpha),
            "residual_doubled_holder": gain.residual_doubled_norm,
            "ratio": gain.norm_ratio,
        },
        "slopes": {
            "f": gain.f_slope,
            "residual": gain.residual_slope,
            "f_status": gain.f_status,
            "residual_status": gain.residual_status,
            "gain": gain.gain,
        },
        "checks": gain.checks,
        "passed": gain.passed,
        "run": _run_meta(cfg),
    }
    write_json(out / "manifest.json", manifest)
    return manifest


def _gain(cfg, dec):
    th = GainThresholds(cfg.min_gain_factor, cfg.residual_slope_tol)
    return verify_residual_gain(dec, cfg.alpha, th)


def cmd_para(cfg: PipelineConfig) -> int:
    f, stacks, dec = _decompose(cfg)
    _write_decomposition(cfg, f, stacks, dec, _gain(cfg, dec))
    return EXIT_OK


def cmd_verify(cfg: PipelineConfig) -> int:
    f, stacks, dec = _decompose(cfg)
    gain = _gain(cfg, dec)
    _write_decomposition(cfg, f, stacks, dec, gain)
    report = gain.to_dict()
    if f.ndim == 2 and all(s.tree.is_balanced_dyadic for s in stacks):
        tb = residual_term_bounds(stacks, f, dec.nonlinearity, cfg.alpha, cfg.quad_order)
        report["term_bounds"] = {
            "slope": tb.slope, "target_slope": tb.target_slope, "status": tb.status,
            "rows": [vars(row) for row in tb.rows],
        }
    write_json(Path(cfg.out) / "gain_report.json", report)
    print("PASS" if gain.passed else "FAIL", json.dumps(_clean(gain.checks), sort_keys=True))
    return EXIT_OK if gain.passed else EXIT_FAIL


def cmd_synth(cfg: PipelineConfig) -> int:
    out = _outdir(cfg)
    trees = _trees_for(cfg, None)
    if len(trees) == 1:
        f = synthesize_holder_signal(trees[0], cfg.alpha, cfg.seed, cfg.amplitude)
        write_signal_csv(out / "signal.csv", f)
    else:
        f = synthesize_holder_signal_2d(trees, cfg.alpha, cfg.seed, cfg.amplitude)
        write_matrix_csv(out / "matrix.csv", f)
    return EXIT_OK


def cmd_report(cfg: PipelineConfig) -> int:
    out = _outdir(cfg)
    f = _load_signal(cfg)
    basis = _basis(_trees_for(cfg, f.shape))
    rep = holder_report(f, basis, cfg.alpha)
    write_json(out / "holder_report.json", {**rep.to_dict(), "run": _run_meta(cfg)})
    rep.decay.write_csv(out / "decay.csv")
    return EXIT_OK


HANDLERS = {
    "tree": cmd_tree, "transform": cmd_transform, "para": cmd_para,
    "verify": cmd_verify, "synth": cmd_synth, "report": cmd_report,
}


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("TREEPARA_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(argv)
        log.debug("config %s", cfg)
        return HANDLERS[cfg.command](cfg)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except (TreeParaError, KeyError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

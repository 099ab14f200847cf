"""Command-line surface tying the library together: pool token matrices,
fit and apply projections, evaluate alignments, synthesize corpora, and
export 2-D views.

Exit codes: 0 success, 1 usage error, 2 data or parameter error,
3 numerical failure. Machine-readable diagnostics go to standard output
as JSON; error diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .aligners import SgdConfig, apply_projection, fit_least_squares, \
    fit_procrustes, fit_sgd, with_meta
from .corpus import ParallelCorpus
from .errors import ConvergenceError
from .io import DTYPE_FLOAT32, DTYPE_FLOAT64, export_2d, read_gold_tsv, \
    read_matrix_auto, read_projection, read_semb, report_to_dict, \
    write_projection, write_report_json, write_semb
from .metrics import avg_pair_cosine, sts_eval
from .pooling import stack_pooled
from .synth import SynthSpec, generate

PROG = "sembalign"


@dataclass(frozen=True)
class CliConfig:
    """A parsed invocation: the subcommand plus its flag values."""

    subcommand: str
    options: dict


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors, but 2 is reserved
    for data errors here, so usage failures exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("pool", help="mean-pool token matrices into one "
                       "embedding row each")
    p.add_argument("--tokens", nargs="+", required=True, metavar="PATH",
                   help="token matrices (SEMB or TSV), one per sentence")
    p.add_argument("--out", required=True, help="output SEMB path")

    p = sub.add_parser("fit", help="fit a projection from source to target "
                       "embeddings")
    p.add_argument("--method", required=True,
                   choices=("lsq", "procrustes", "sgd"))
    p.add_argument("--source", required=True, help="source embeddings")
    p.add_argument("--target", required=True, help="target embeddings")
    p.add_argument("--out", required=True, help="output projection path")
    p.add_argument("--ridge", type=float, default=0.0,
                   help="ridge strength for lsq (default 0: pseudo-inverse)")
    p.add_argument("--lr", type=float, default=0.05, help="sgd learning rate")
    p.add_argument("--epochs", type=int, default=500, help="sgd epoch cap")
    p.add_argument("--batch", type=int, default=32, help="sgd batch size")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="sgd stopping threshold on epoch mean squared error")
    p.add_argument("--seed", type=int, default=0, help="sgd shuffle seed")
    p.add_argument("--center", action="store_true",
                   help="subtract column means before fitting (default off)")
    p.add_argument("--unit-norm", action="store_true",
                   help="scale rows to unit length before fitting (default off)")

    p = sub.add_parser("apply", help="apply a projection to embeddings")
    p.add_argument("--proj", required=True, help="projection SEMB path")
    p.add_argument("--in", dest="input", required=True,
                   help="input embeddings")
    p.add_argument("--out", required=True, help="output SEMB path")

    p = sub.add_parser("eval-align", help="report average pair cosine, "
                       "optionally after projecting the source side")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--proj", default=None, help="optional projection; its "
                   "recorded preprocessing is replayed")
    p.add_argument("--report", required=True, help="output JSON path")

    p = sub.add_parser("eval-sts", help="report rank correlations of pair "
                       "cosines against gold similarity scores")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--gold", required=True, help="gold scores TSV, one per line")
    p.add_argument("--proj", default=None)
    p.add_argument("--report", required=True, help="output JSON path")

    p = sub.add_parser("synth", help="generate a synthetic parallel corpus "
                       "with a planted linear map")
    p.add_argument("--n", type=int, required=True, help="number of pairs")
    p.add_argument("--d", type=int, required=True, help="embedding dimension")
    p.add_argument("--map", required=True,
                   choices=("orthogonal", "general", "identity"))
    p.add_argument("--noise", type=float, default=0.0,
                   help="stddev of additive Gaussian noise on the target")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True,
                   help="writes PREFIX.source.semb, PREFIX.target.semb, "
                   "PREFIX.map.semb")

    p = sub.add_parser("export-2d", help="project rows to their top-2 "
                       "principal directions as plot-ready TSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="output TSV path")

    p = sub.add_parser("diff", help="compare two SEMB matrices")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--tol", type=float, default=None,
                   help="fail (exit 2) if Frobenius distance exceeds this")

    return parser


def _unit_norm_rows(matrix: np.ndarray, name: str) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValueError(
            f"{name} row {zero[0]} has zero norm; cannot unit-normalize")
    return matrix / norms[:, None]


def _fit_preprocess(source, target, center: bool, unit_norm: bool):
    """Apply optional preprocessing and return the record that lets
    evaluation replay it. Both default off: alignment quality is measured
    on the raw embeddings unless explicitly requested otherwise."""
    record = {"center": bool(center), "unit_norm": bool(unit_norm)}
    if center:
        source_mean = source.mean(axis=0)
        target_mean = target.mean(axis=0)
        record["source_mean"] = [float(x) for x in source_mean]
        record["target_mean"] = [float(x) for x in target_mean]
        source = source - source_mean
        target = target - target_mean
    if unit_norm:
        source = _unit_norm_rows(source, "source")
        target = _unit_norm_rows(target, "target")
    return source, target, record


def _replay_preprocess(source, target, proj):
    """Re-apply the preprocessing recorded at fit time, using the stored
    fit-time means rather than recomputing them on the evaluation data."""
    record = None if proj is None else proj.meta.get("preprocess")
    if not record:
        return source, target
    if record.get("center"):
        source = source - np.asarray(record["source_mean"], dtype=np.float64)
        target = target - np.asarray(record["target_mean"], dtype=np.float64)
    if record.get("unit_norm"):
        source = _unit_norm_rows(source, "source")
        target = _unit_norm_rows(target, "target")
    return source, target


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _cmd_pool(cfg: CliConfig) -> int:
    opts = cfg.options
    matrices = [read_matrix_auto(p) for p in opts["tokens"]]
    pooled = stack_pooled(matrices)
    write_semb(pooled, opts["out"], dtype=DTYPE_FLOAT32)
    _emit({"subcommand": "pool", "rows": pooled.shape[0],
           "dim": pooled.shape[1], "out": str(opts["out"])})
    return 0


def _cmd_fit(cfg: CliConfig) -> int:
    opts = cfg.options
    source = read_matrix_auto(opts["source"])
    target = read_matrix_auto(opts["target"])
    source, target, record = _fit_preprocess(
        source, target, opts["center"], opts["unit_norm"])
    corpus = ParallelCorpus(source=source, target=target)
    method = opts["method"]
    if method == "lsq":
        proj = fit_least_squares(corpus, ridge=opts["ridge"])
    elif method == "procrustes":
        proj = fit_procrustes(corpus)
    else:
        config = SgdConfig(learning_rate=opts["lr"], epochs=opts["epochs"],
                           batch_size=opts["batch"], tol=opts["tol"],
                           seed=opts["seed"])
        proj = fit_sgd(corpus, config)
    proj = with_meta(proj, preprocess=record)
    write_projection(proj, opts["out"], dtype=DTYPE_FLOAT64)
    diagnostics = {"subcommand": "fit", "method": proj.method,
                   "out": str(opts["out"])}
    diagnostics.update(
        {k: v for k, v in proj.meta.items() if k != "preprocess"})
    diagnostics["center"] = record["center"]
    diagnostics["unit_norm"] = record["unit_norm"]
    _emit(diagnostics)
    return 0


def _cmd_apply(cfg: CliConfig) -> int:
    opts = cfg.options
    proj = read_projection(opts["proj"])
    matrix = read_matrix_auto(opts["input"])
    projected = apply_projection(proj, matrix)
    write_semb(projected, opts["out"], dtype=DTYPE_FLOAT64)
    _emit({"subcommand": "apply", "rows": projected.shape[0],
           "dim": projected.shape[1], "out": str(opts["out"])})
    return 0


def _load_eval_corpus(opts):
    source = read_matrix_auto(opts["source"])
    target = read_matrix_auto(opts["target"])
    proj = read_projection(opts["proj"]) if opts.get("proj") else None
    source, target = _replay_preprocess(source, target, proj)
    return ParallelCorpus(source=source, target=target), proj


def _cmd_eval_align(cfg: CliConfig) -> int:
    opts = cfg.options
    corpus, proj = _load_eval_corpus(opts)
    report = avg_pair_cosine(corpus, proj)
    write_report_json(report, opts["report"])
    _emit(report_to_dict(report))
    return 0


def _cmd_eval_sts(cfg: CliConfig) -> int:
    opts = cfg.options
    corpus, proj = _load_eval_corpus(opts)
    gold = read_gold_tsv(opts["gold"])
    report = sts_eval(corpus, gold, proj)
    write_report_json(report, opts["report"])
    _emit(report_to_dict(report))
    return 0


def _cmd_synth(cfg: CliConfig) -> int:
    opts = cfg.options
    spec = SynthSpec(n=opts["n"], d=opts["d"], map_kind=opts["map"],
                     noise_sigma=opts["noise"], seed=opts["seed"])
    corpus, true_map = generate(spec)
    prefix = opts["out_prefix"]
    paths = {
        "source": f"{prefix}.source.semb",
        "target": f"{prefix}.target.semb",
        "map": f"{prefix}.map.semb",
    }
    write_semb(corpus.source, paths["source"], dtype=DTYPE_FLOAT64)
    write_semb(corpus.target, paths["target"], dtype=DTYPE_FLOAT64)
    write_semb(true_map, paths["map"], dtype=DTYPE_FLOAT64)
    _emit({"subcommand": "synth", "n": spec.n, "d": spec.d,
           "map": spec.map_kind, "noise": spec.noise_sigma,
           "seed": spec.seed, "files": paths})
    return 0


def _cmd_export_2d(cfg: CliConfig) -> int:
    opts = cfg.options
    matrix = read_matrix_auto(opts["input"])
    export_2d(matrix, opts["out"])
    _emit({"subcommand": "export-2d", "rows": matrix.shape[0],
           "out": str(opts["out"])})
    return 0


def _cmd_diff(cfg: CliConfig) -> int:
    opts = cfg.options
    a = read_semb(opts["a"])
    b = read_semb(opts["b"])
    if a.shape != b.shape:
        raise ValueError(
            f"shape mismatch: {a.shape[0]}x{a.shape[1]} vs "
            f"{b.shape[0]}x{b.shape[1]}")
    delta = a - b
    frobenius = float(np.linalg.norm(delta))
    max_abs = float(np.max(np.abs(delta)))
    _emit({"subcommand": "diff", "frobenius": frobenius, "max_abs": max_abs})
    if opts["tol"] is not None and frobenius > opts["tol"]:
        raise ValueError(
            f"frobenius distance {frobenius} exceeds tolerance {opts['tol']}")
    return 0


_HANDLERS = {
    "pool": _cmd_pool,
    "fit": _cmd_fit,
    "apply": _cmd_apply,
    "eval-align": _cmd_eval_align,
    "eval-sts": _cmd_eval_sts,
    "synth": _cmd_synth,
    "export-2d": _cmd_export_2d,
    "diff": _cmd_diff,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)
    config = CliConfig(subcommand=args.subcommand, options=vars(args))
    try:
        return _HANDLERS[config.subcommand](config)
    except ConvergenceError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

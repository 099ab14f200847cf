"""Interchange formats: SEMB binary matrices, TSV matrices and gold
scores, JSON reports, projection metadata sidecars, and 2-D plot exports.

SEMB layout (little-endian, 25-byte header then row-major payload):

    offset 0   magic   4 bytes  b"SEMB"
    offset 4   version u32      1
    offset 8   dtype   u8       1 = float32, 2 = float64
    offset 9   rows    u64
    offset 17  cols    u64

Readers validate everything up front and fail with a positional message;
a partially read matrix is never returned. Round-trips are bitwise
lossless at matching dtype.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from . import __version__
from .aligners import ProjectionMatrix
from .corpus import ParallelCorpus, StsGold
from .metrics import AlignmentReport
from .validation import as_matrix

SEMB_MAGIC = b"SEMB"
SEMB_VERSION = 1
DTYPE_FLOAT32 = 1
DTYPE_FLOAT64 = 2

_HEADER = struct.Struct("<4sIBQQ")
_NUMPY_DTYPES = {DTYPE_FLOAT32: np.dtype("<f4"), DTYPE_FLOAT64: np.dtype("<f8")}


def write_semb(m, path, dtype: int = DTYPE_FLOAT32) -> None:
    """Write a matrix (or a ProjectionMatrix) to a SEMB file.

    ``dtype`` selects the stored precision: 1 = float32 (the interchange
    default, what embedding extractors emit), 2 = float64 (lossless for
    internal artifacts such as fitted projections). Non-finite data is
    refused.
    """
    if isinstance(m, ProjectionMatrix):
        m = m.data
    matrix = as_matrix(m, "matrix")
    if dtype not in _NUMPY_DTYPES:
        raise ValueError(f"dtype must be 1 (float32) or 2 (float64), got {dtype}")
    payload = np.ascontiguousarray(matrix, dtype=_NUMPY_DTYPES[dtype])
    header = _HEADER.pack(SEMB_MAGIC, SEMB_VERSION, dtype,
                          matrix.shape[0], matrix.shape[1])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_semb(path) -> np.ndarray:
    """Read a SEMB file into a float64 matrix, validating the header, the
    payload length, and finiteness."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size or raw[:4] != SEMB_MAGIC:
        raise ValueError(f"{path}: not a SEMB file")
    magic, version, dtype, rows, cols = _HEADER.unpack_from(raw)
    if version != SEMB_VERSION:
        raise ValueError(f"{path}: unsupported SEMB version {version}")
    if dtype not in _NUMPY_DTYPES:
        raise ValueError(f"{path}: unknown dtype code {dtype}")
    if rows < 1 or cols < 1:
        raise ValueError(f"{path}: empty matrix ({rows}x{cols})")
    np_dtype = _NUMPY_DTYPES[dtype]
    expected = rows * cols * np_dtype.itemsize
    actual = len(raw) - _HEADER.size
    if actual != expected:
        raise ValueError(
            f"{path}: payload length mismatch (expected {expected} bytes "
            f"for {rows}x{cols}, found {actual})")
    matrix = np.frombuffer(raw, dtype=np_dtype, offset=_HEADER.size)
    matrix = matrix.reshape(rows, cols).astype(np.float64)
    if not np.isfinite(matrix).all():
        i, j = np.argwhere(~np.isfinite(matrix))[0]
        raise ValueError(f"{path}: non-finite value at row {i}, col {j}")
    return matrix


def read_tsv_matrix(path) -> np.ndarray:
    """Parse a tab-separated matrix: one row per line, uniform column
    count, decimal floats (scientific notation accepted). Errors carry the
    offending line (1-based) and column."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ValueError(f"{path}: empty input")
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split("\t")
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise ValueError(
                f"{path}: line {lineno} has {len(tokens)} columns, expected {width}")
        row = []
        for col, token in enumerate(tokens, start=1):
            try:
                value = float(token)
            except ValueError:
                raise ValueError(
                    f"{path}: cannot parse {token!r} at line {lineno}, "
                    f"column {col}") from None
            row.append(value)
        rows.append(row)
    return as_matrix(rows, f"{path}")


def read_gold_tsv(path) -> StsGold:
    """Parse one gold similarity score per line, validated into [0, 5]."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ValueError(f"{path}: empty input")
    scores = []
    for lineno, line in enumerate(lines, start=1):
        try:
            value = float(line.strip())
        except ValueError:
            raise ValueError(
                f"{path}: cannot parse {line.strip()!r} at line {lineno}") from None
        if not 0.0 <= value <= 5.0:
            raise ValueError(
                f"{path}: score {value} at line {lineno} outside [0, 5]")
        scores.append(value)
    return StsGold(scores=np.asarray(scores))


def read_matrix_auto(path) -> np.ndarray:
    """Load a matrix from either format, sniffing the SEMB magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == SEMB_MAGIC:
        return read_semb(path)
    return read_tsv_matrix(path)


def _sig6(value: float) -> float:
    return float(f"{value:.6g}")


def report_to_dict(report: AlignmentReport) -> dict:
    """Render a report for serialization: stable key order, metric values
    at 6 significant digits, correlations x100 (percentile convention)."""
    out = {
        "tool": "sembalign",
        "version": __version__,
        "method": report.method,
        "timestamp": report.timestamp,
        "n_pairs": report.n_pairs,
        "avg_cosine": _sig6(report.avg_cosine),
        "residual_frobenius": _sig6(report.residual_frobenius),
    }
    if report.spearman is not None:
        out["spearman_percentile"] = _sig6(100.0 * report.spearman)
    if report.pearson is not None:
        out["pearson_percentile"] = _sig6(100.0 * report.pearson)
    if report.spearman is not None or report.pearson is not None:
        out["notes"] = ("correlations rendered x100; Spearman uses average "
                        "ranks for ties")
    if report.per_pair_cosine is not None:
        out["per_pair_cosine"] = [_sig6(c) for c in report.per_pair_cosine]
    return out


def write_report_json(report: AlignmentReport, path) -> None:
    """Write the rendered report as human-readable JSON."""
    Path(path).write_text(json.dumps(report_to_dict(report), indent=2) + "\n",
                          encoding="utf-8")


def write_projection(proj: ProjectionMatrix, path,
                     dtype: int = DTYPE_FLOAT64) -> None:
    """Write a fitted projection as SEMB plus a ``<path>.meta.json``
    sidecar carrying the method label and fit diagnostics.

    The SEMB layout has no metadata field, so the sidecar is what lets
    evaluation replay fit-time preprocessing. float64 by default: the
    orthogonality of a Procrustes map does not survive float32 rounding.
    """
    write_semb(proj.data, path, dtype=dtype)
    sidecar = {"method": proj.method, "meta": proj.meta}
    Path(_sidecar_path(path)).write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_projection(path) -> ProjectionMatrix:
    """Read a projection SEMB file, picking up the metadata sidecar when
    present. Files without a sidecar load with method "unknown"."""
    data = read_semb(path)
    sidecar = Path(_sidecar_path(path))
    if sidecar.exists():
        info = json.loads(sidecar.read_text(encoding="utf-8"))
        return ProjectionMatrix(data=data, method=info.get("method", "unknown"),
                                meta=info.get("meta", {}))
    return ProjectionMatrix(data=data, method="unknown")


def _sidecar_path(path) -> str:
    return str(path) + ".meta.json"


def export_2d(m, path) -> None:
    """Project rows onto their top-2 principal directions and write
    ``x<TAB>y`` lines, one per row: plot-ready data for external tools.

    Rows are centered first; each principal direction is sign-normalized
    so its first nonzero component is positive, making the export
    deterministic.
    """
    matrix = as_matrix(m, "matrix")
    if matrix.shape[0] < 2:
        raise ValueError(f"need at least 2 rows to project, got {matrix.shape[0]}")
    if matrix.shape[1] < 2:
        raise ValueError(f"need dimension >= 2, got {matrix.shape[1]}")
    centered = matrix - matrix.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    directions = vt[:2].copy()
    for k in range(2):
        nonzero = np.flatnonzero(directions[k])
        if nonzero.size and directions[k][nonzero[0]] < 0:
            directions[k] = -directions[k]
    coords = centered @ directions.T
    lines = [f"{float(x)!r}\t{float(y)!r}" for x, y in coords]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_manifest(path, source_path, target_path, source_lang: str = "src",
                   target_lang: str = "tgt", gold_path=None,
                   notes: str = "") -> None:
    """Write a pair manifest: file references plus language tags."""
    manifest = {
        "source_path": str(source_path),
        "target_path": str(target_path),
        "source_lang": source_lang,
        "target_lang": target_lang,
        "gold_path": None if gold_path is None else str(gold_path),
        "notes": notes,
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n",
                          encoding="utf-8")


def read_manifest(path) -> tuple[ParallelCorpus, StsGold | None]:
    """Load the corpus a manifest references, validating that the files
    exist and that row counts line up. Relative paths resolve against the
    manifest's directory."""
    base = Path(path).parent
    info = json.loads(Path(path).read_text(encoding="utf-8"))
    for key in ("source_path", "target_path"):
        if key not in info:
            raise ValueError(f"{path}: manifest missing {key!r}")

    def _resolve(p):
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    source_path = _resolve(info["source_path"])
    target_path = _resolve(info["target_path"])
    for p in (source_path, target_path):
        if not p.exists():
            raise ValueError(f"{path}: referenced file {p} does not exist")
    corpus = ParallelCorpus(
        source=read_matrix_auto(source_path),
        target=read_matrix_auto(target_path),
        source_lang=info.get("source_lang", "src"),
        target_lang=info.get("target_lang", "tgt"),
    )
    gold = None
    if info.get("gold_path"):
        gold_path = _resolve(info["gold_path"])
        if not gold_path.exists():
            raise ValueError(f"{path}: referenced file {gold_path} does not exist")
        gold = read_gold_tsv(gold_path)
        if len(gold) != corpus.n_pairs:
            raise ValueError(
                f"{path}: gold has {len(gold)} scores but corpus has "
                f"{corpus.n_pairs} pairs")
    return corpus, gold

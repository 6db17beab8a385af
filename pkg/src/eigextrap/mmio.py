"""Matrix Market reader and iteration-trace CSV serialization."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .errors import ParseError, UnsupportedFormatError
from .linop import CsrMatrix, DenseMatrix, MatrixHandle
from .solvers import IterationTrace

__all__ = [
    "read_matrix_market",
    "load_matrix_market",
    "write_trace_csv",
    "read_trace_csv",
    "TRACE_HEADER",
]

TRACE_HEADER = ("k", "method", "lambda", "residual_norm", "gamma", "p", "h")

_UNSUPPORTED = {"complex", "pattern", "integer", "hermitian", "skew-symmetric"}


def _text_lines(source):
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    for raw in source:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        yield raw.rstrip("\r\n")


def _data_lines(lines, start):
    """Yield ``(lineno, tokens)`` for non-blank, non-comment lines."""
    for lineno, line in enumerate(lines, start=start):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        yield lineno, stripped.split()


def _parse_header(line):
    tokens = line.strip().split()
    if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket":
        raise ParseError("missing or malformed %%MatrixMarket header", 1)
    obj, fmt, fld, sym = (t.lower() for t in tokens[1:])
    if obj != "matrix":
        raise UnsupportedFormatError(tokens[1], 1)
    for token, value in zip(tokens[2:], (fmt, fld, sym)):
        if value in _UNSUPPORTED:
            raise UnsupportedFormatError(token, 1)
    if fmt not in ("coordinate", "array"):
        raise UnsupportedFormatError(tokens[2], 1)
    if fld != "real":
        raise UnsupportedFormatError(tokens[3], 1)
    if sym not in ("general", "symmetric") or (fmt == "array" and sym != "general"):
        raise UnsupportedFormatError(tokens[4], 1)
    return fmt, sym


def _ints(tokens, lineno, count):
    if len(tokens) != count:
        raise ParseError(f"expected {count} integers, got {len(tokens)} fields", lineno)
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"non-integer field in {' '.join(tokens)!r}", lineno) from None
    if any(v < 0 for v in values):
        raise ParseError("negative size", lineno)
    return values


def _real(token, lineno):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"non-numeric value {token!r}", lineno) from None


def read_matrix_market(source, label="") -> MatrixHandle:
    """Parse a real Matrix Market stream (binary or text) into a square handle.

    Coordinate files become CSR with duplicates summed; symmetric storage is
    mirrored into both triangles.  Array files become dense.
    """
    lines = _text_lines(source)
    try:
        header = next(lines)
    except StopIteration:
        raise ParseError("empty input", 1) from None
    fmt, sym = _parse_header(header)
    body = _data_lines(lines, start=2)

    try:
        lineno, tokens = next(body)
    except StopIteration:
        raise ParseError("missing size line", 2) from None

    if fmt == "array":
        n_rows, n_cols = _ints(tokens, lineno, 2)
        values = []
        for lineno, tokens in body:
            if len(tokens) != 1:
                raise ParseError("array entries hold exactly one value", lineno)
            values.append(_real(tokens[0], lineno))
        if len(values) != n_rows * n_cols:
            raise ParseError(f"expected {n_rows * n_cols} entries, found {len(values)}", lineno)
        if n_rows != n_cols:
            raise ParseError(f"matrix is {n_rows}x{n_cols}, expected square", lineno)
        dense = np.array(values, dtype=np.float64).reshape((n_cols, n_rows)).T
        return MatrixHandle(DenseMatrix(dense), label)

    n_rows, n_cols, nnz = _ints(tokens, lineno, 3)
    if n_rows != n_cols:
        raise ParseError(f"matrix is {n_rows}x{n_cols}, expected square", lineno)
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    count = 0
    for lineno, tokens in body:
        if len(tokens) != 3:
            raise ParseError(f"expected 'row col value', got {len(tokens)} fields", lineno)
        if count >= nnz:
            raise ParseError(f"more than the declared {nnz} entries", lineno)
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"non-integer index in {' '.join(tokens[:2])!r}", lineno) from None
        if not (1 <= i <= n_rows and 1 <= j <= n_cols):
            raise ParseError(f"index ({i}, {j}) outside {n_rows}x{n_cols}", lineno)
        if sym == "symmetric" and j > i:
            raise ParseError(f"symmetric storage holds the lower triangle only, got ({i}, {j})", lineno)
        rows[count], cols[count] = i - 1, j - 1
        vals[count] = _real(tokens[2], lineno)
        count += 1
    if count != nnz:
        raise ParseError(f"declared {nnz} entries, found {count}", lineno)

    if sym == "symmetric":
        off = rows != cols
        rows, cols = np.concatenate((rows, cols[off])), np.concatenate((cols, rows[off]))
        vals = np.concatenate((vals, vals[off]))
    return MatrixHandle(CsrMatrix.from_coo(n_rows, n_cols, rows, cols, vals), label)


def load_matrix_market(path) -> MatrixHandle:
    path = Path(path)
    with path.open("rb") as fh:
        return read_matrix_market(fh, label=path.stem)


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_trace_csv(trace: IterationTrace, method: str, sink) -> None:
    """Write ``k,method,lambda,residual_norm,gamma,p,h`` rows, UTF-8, LF endings.

    ``sink`` may be a binary or text stream.
    """
    text = io.StringIO()
    text.write(",".join(TRACE_HEADER) + "\n")
    for row in trace.rows(method):
        text.write(
            f"{row.k},{method},{_fmt(row.lam)},{_fmt(row.residual_norm)},"
            f"{_fmt(row.gamma)},{_fmt(row.p)},{_fmt(row.h)}\n"
        )
    data = text.getvalue()
    if isinstance(sink, io.TextIOBase):
        sink.write(data)
    else:
        sink.write(data.encode("utf-8"))


def read_trace_csv(source) -> dict:
    """Inverse of :func:`write_trace_csv`; returns ``{method: IterationTrace}``."""
    if isinstance(source, (bytes, bytearray)):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    elif not isinstance(source, io.TextIOBase):
        source = io.TextIOWrapper(source, encoding="utf-8", newline="")
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(header) != TRACE_HEADER:
        raise ParseError(f"bad trace header {header!r}", 1)
    traces = {}
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(TRACE_HEADER):
            raise ParseError(f"expected {len(TRACE_HEADER)} fields", lineno)
        try:
            k = int(row[0])
            lam, res, gamma, p, h = (float(v) for v in row[2:])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        traces.setdefault(row[1], IterationTrace()).append(k, lam, res, gamma, p, h)
    return traces

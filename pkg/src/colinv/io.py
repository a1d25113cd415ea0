"""Matrix files: CSV text and the little-endian ``CINV`` binary format.

Binary layout: the 4 bytes ``CINV``, ``u32`` rows, ``u32`` cols, then
``rows * cols`` IEEE-754 ``f64`` values in row-major order, all little-endian.
CSV: one row per line, ``,`` separator, ``.`` decimal point, no header;
values are written with 17 significant digits so they round-trip exactly.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import InputError
from .linalg import as_matrix

MAGIC = b"CINV"
_HEADER = struct.Struct("<4sII")


def format_csv(A) -> str:
    A = np.asarray(A, dtype=np.float64)
    return "".join(",".join(f"{v:.17g}" for v in row) + "\n" for row in A)


def parse_csv(text: str, source: str = "<csv>") -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split(",")
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            bad = next(f for f in fields if not _is_float(f))
            raise InputError(f"{source}:{lineno}: not a number: {bad.strip()!r}") from None
        if len(rows[-1]) != len(rows[0]):
            raise InputError(f"{source}:{lineno}: expected {len(rows[0])} values, got {len(rows[-1])}")
    if not rows:
        raise InputError(f"{source}: no matrix rows")
    try:
        return as_matrix(rows, source)
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def _is_float(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def to_binary(A) -> bytes:
    A = np.asarray(A, dtype=np.float64)
    rows, cols = A.shape
    return _HEADER.pack(MAGIC, rows, cols) + np.ascontiguousarray(A, dtype="<f8").tobytes()


def from_binary(data: bytes, source: str = "<binary>") -> np.ndarray:
    if len(data) < _HEADER.size:
        raise InputError(f"{source}: truncated header")
    magic, rows, cols = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise InputError(f"{source}: bad magic {magic!r}, expected {MAGIC!r}")
    expected = _HEADER.size + 8 * rows * cols
    if len(data) != expected:
        raise InputError(f"{source}: expected {expected} bytes for {rows}x{cols}, got {len(data)}")
    A = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(rows, cols)
    return as_matrix(A.astype(np.float64), source)


def read_matrix(path) -> np.ndarray:
    """Read a matrix, detecting the binary format by its magic bytes."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if data[:4] == MAGIC:
        return from_binary(data, str(path))
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        raise InputError(f"{path}: neither CINV binary nor ASCII CSV") from None
    return parse_csv(text, str(path))


def write_matrix(path, A) -> None:
    """Write CSV, or binary when the file name ends in ``.bin``."""
    path = Path(path)
    if path.suffix == ".bin":
        path.write_bytes(to_binary(A))
    else:
        path.write_text(format_csv(A))

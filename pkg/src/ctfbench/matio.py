"""Binary matrix file format and CSV interchange.

Layout of a `.mat` file: the 8-byte magic ``CTFMAT01``, a little-endian
u64 row count, a little-endian u64 column count, then rows*cols
little-endian float64 values in row-major order. Writes are atomic
(temp file + rename). CSV files hold one time step per row with
full-precision decimal values.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .exceptions import MatrixFormatError

MAGIC = b"CTFMAT01"
_HEADER = struct.Struct("<QQ")


def _as_matrix(x: np.ndarray) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise MatrixFormatError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a


def atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    """Write bytes to `path` via a temp file in the same directory + rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(path: str | Path, x: np.ndarray) -> None:
    """Write a 2-D float64 matrix in the binary format."""
    a = _as_matrix(x)
    rows, cols = a.shape
    payload = MAGIC + _HEADER.pack(rows, cols) + np.ascontiguousarray(a).astype("<f8").tobytes()
    atomic_write_bytes(path, payload)


def read_matrix(path: str | Path) -> np.ndarray:
    """Read a matrix written by `write_matrix`, validating header and size."""
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + _HEADER.size:
        raise MatrixFormatError(f"{path}: file too short for a matrix header")
    if raw[: len(MAGIC)] != MAGIC:
        raise MatrixFormatError(f"{path}: bad magic {raw[:8]!r}, expected {MAGIC!r}")
    rows, cols = _HEADER.unpack_from(raw, len(MAGIC))
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"{path}: invalid header dimensions [{rows}, {cols}]")
    body = raw[len(MAGIC) + _HEADER.size :]
    expected = rows * cols * 8
    if len(body) != expected:
        raise MatrixFormatError(
            f"{path}: shape mismatch, header says [{rows}, {cols}] "
            f"({expected} payload bytes) but file holds {len(body)}"
        )
    return np.frombuffer(body, dtype="<f8").reshape(rows, cols).astype(np.float64)


def write_csv(path: str | Path, x: np.ndarray) -> None:
    """Write a matrix as comma-separated decimal text, one time step per row.

    Values use 17 significant digits, enough to round-trip float64 exactly.
    """
    a = _as_matrix(x)
    lines = [",".join(format(v, ".17g") for v in row) for row in a]
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_csv(path: str | Path) -> np.ndarray:
    """Read a matrix from comma-separated text."""
    try:
        a = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: malformed CSV matrix: {exc}") from exc
    if a.size == 0:
        raise MatrixFormatError(f"{path}: empty CSV matrix")
    return a


def read_any(path: str | Path) -> np.ndarray:
    """Read a matrix by extension: `.mat` binary or `.csv` text."""
    path = Path(path)
    if path.suffix == ".csv":
        return read_csv(path)
    return read_matrix(path)

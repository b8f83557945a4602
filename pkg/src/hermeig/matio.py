"""Matrix file formats.

Text format: Matrix Market dense array format with complex entries written
as "re im" pairs, column-major body order, with the header symmetry field
carrying the Hermitian certification.

Binary format: magic ``HMAT``, little-endian u64 rows, cols, flags
(bit 0 = hermitian certified), followed by rows*cols little-endian f64
(re, im) pairs in row-major order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import PreconditionError
from .matcore import Mat

_MAGIC = b"HMAT"
_HEADER = struct.Struct("<4sQQQ")
_FLAG_HERMITIAN = 1


def save_matrix_market(path, m: Mat) -> None:
    symmetry = "hermitian" if m.hermitian_certified else "general"
    arr = m.to_array()
    rows, cols = arr.shape
    lines = [f"%%MatrixMarket matrix array complex {symmetry}\n"]
    lines.append(f"{rows} {cols}\n")
    if symmetry == "hermitian":
        # lower triangle including the diagonal, column by column
        for j in range(cols):
            for i in range(j, rows):
                v = arr[i, j]
                lines.append(f"{float(v.real)!r} {float(v.imag)!r}\n")
    else:
        for j in range(cols):
            for i in range(rows):
                v = arr[i, j]
                lines.append(f"{float(v.real)!r} {float(v.imag)!r}\n")
    Path(path).write_text("".join(lines))


def load_matrix_market(path) -> Mat:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("%%MatrixMarket"):
        raise PreconditionError(f"{path}: not a MatrixMarket file")
    header = text[0].split()
    if len(header) < 5 or header[1] != "matrix" or header[2] != "array":
        raise PreconditionError(f"{path}: unsupported MatrixMarket header")
    field, symmetry = header[3], header[4]
    body = [ln for ln in text[1:] if ln.strip() and not ln.startswith("%")]
    rows, cols = (int(tok) for tok in body[0].split()[:2])
    values = []
    for ln in body[1:]:
        toks = ln.split()
        if field == "complex":
            values.append(complex(float(toks[0]), float(toks[1])))
        else:
            values.append(complex(float(toks[0]), 0.0))
    arr = np.zeros((rows, cols), dtype=np.complex128)
    k = 0
    if symmetry == "hermitian":
        for j in range(cols):
            for i in range(j, rows):
                arr[i, j] = values[k]
                if i != j:
                    arr[j, i] = values[k].conjugate()
                k += 1
        arr[np.arange(rows), np.arange(rows)] = arr.diagonal().real
        return Mat(arr, hermitian_certified=True)
    for j in range(cols):
        for i in range(rows):
            arr[i, j] = values[k]
            k += 1
    return Mat(arr)


def save_binary(path, m: Mat) -> None:
    arr = m.to_array()
    flags = _FLAG_HERMITIAN if m.hermitian_certified else 0
    payload = np.empty(arr.shape + (2,), dtype="<f8")
    payload[..., 0] = arr.real
    payload[..., 1] = arr.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, arr.shape[0], arr.shape[1], flags))
        fh.write(payload.tobytes())


def load_binary(path) -> Mat:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise PreconditionError(f"{path}: truncated matrix file")
    magic, rows, cols, flags = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise PreconditionError(f"{path}: bad magic {magic!r}")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != rows * cols * 2:
        raise PreconditionError(f"{path}: payload size mismatch")
    body = body.reshape(rows, cols, 2)
    arr = body[..., 0] + 1j * body[..., 1]
    return Mat(arr, hermitian_certified=bool(flags & _FLAG_HERMITIAN))


def save(path, m: Mat) -> None:
    """Dispatch on extension: .mtx text, anything else binary."""
    if str(path).endswith(".mtx"):
        save_matrix_market(path, m)
    else:
        save_binary(path, m)


def load(path) -> Mat:
    if str(path).endswith(".mtx"):
        return load_matrix_market(path)
    return load_binary(path)

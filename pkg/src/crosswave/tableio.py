"""Deterministic on-disk formats: CSV tables and raw field snapshots.

Every writer goes through a temp file in the destination directory followed
by an atomic rename, so a crashed run never leaves a half-written artifact.
CSV numbers are printed with 17 significant digits ('%.17g', '.' decimal,
'\\n' line endings): two runs of the same spec produce byte-identical files.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np


def _atomic_write(file_path, data: bytes) -> None:
    file_path = os.fspath(file_path)
    directory = os.path.dirname(file_path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-crosswave-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, file_path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def format_float(x: float) -> str:
    return "%.17g" % float(x)


def write_csv(file_path, header, rows, comment: str = "") -> None:
    """CSV with one optional '# ...' comment line, then header, then rows.

    rows is any 2-D iterable of floats; the comment line is where callers
    echo their configuration for provenance.
    """
    lines = []
    if comment:
        for part in str(comment).splitlines():
            lines.append("# " + part)
    lines.append(",".join(header))
    for row in np.atleast_2d(np.asarray(rows, dtype=float)):
        lines.append(",".join(format_float(v) for v in row))
    _atomic_write(file_path, ("\n".join(lines) + "\n").encode("utf-8"))


def write_key_values(file_path, pairs, comment: str = "") -> None:
    """Flat `key = value` report, values formatted like the CSV floats."""
    lines = []
    if comment:
        for part in str(comment).splitlines():
            lines.append("# " + part)
    for key, value in pairs:
        if isinstance(value, float):
            value = format_float(value)
        lines.append(f"{key} = {value}")
    _atomic_write(file_path, ("\n".join(lines) + "\n").encode("utf-8"))


def write_spinor_csv(file_path, grid, values: np.ndarray, t: float,
                     comment: str = "", labels=("x", "psi", "t")) -> None:
    """Snapshot of a two-component field: columns x, Re/Im of each component.

    labels renames (coordinate, field, time) for fields living on other
    axes, e.g. ("y", "f", "s") for inner-variable snapshots.
    """
    axis, field, clock = labels
    rows = np.column_stack([grid.points,
                            values[0].real, values[0].imag,
                            values[1].real, values[1].imag])
    header = (axis, f"re_{field}1", f"im_{field}1",
              f"re_{field}2", f"im_{field}2")
    note = f"{clock} = {format_float(t)}"
    write_csv(file_path, header, rows, comment=(comment + "\n" + note).strip())


def write_scalar_csv(file_path, grid, values: np.ndarray, t: float,
                     comment: str = "") -> None:
    rows = np.column_stack([grid.points, values.real, values.imag])
    note = f"t = {format_float(t)}"
    write_csv(file_path, ("y", "re_u", "im_u"), rows,
              comment=(comment + "\n" + note).strip())


_MAGIC = 4.6692016091029907   # header sentinel, checked on read


def write_spinor_binary(file_path, grid, values: np.ndarray, t: float) -> None:
    """Raw snapshot: little-endian float64 header (magic, n, x_min, x_max, t)
    followed by Re psi1, Im psi1, Re psi2, Im psi2, each n values."""
    header = np.array([_MAGIC, grid.n, grid.x_min, grid.x_max, t], dtype="<f8")
    body = np.concatenate([values[0].real, values[0].imag,
                           values[1].real, values[1].imag]).astype("<f8")
    _atomic_write(file_path, header.tobytes() + body.tobytes())


def read_spinor_binary(file_path):
    """Inverse of write_spinor_binary; returns (n, x_min, x_max, t, values)."""
    raw = np.fromfile(os.fspath(file_path), dtype="<f8")
    if raw.size < 5 or raw[0] != _MAGIC:
        raise ValueError(f"{file_path}: not a spinor snapshot")
    n = int(raw[1])
    if raw.size != 5 + 4 * n:
        raise ValueError(f"{file_path}: truncated snapshot")
    x_min, x_max, t = raw[2], raw[3], raw[4]
    flat = raw[5:]
    values = np.stack([flat[0:n] + 1j * flat[n:2 * n],
                       flat[2 * n:3 * n] + 1j * flat[3 * n:4 * n]])
    return n, float(x_min), float(x_max), float(t), values

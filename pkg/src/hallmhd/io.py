"""Binary snapshot format and CSV time-series output.

Snapshot layout (little-endian, no padding):

    magic   4 bytes  b"HMHD"
    version u32      = 1
    n       u32      points per axis
    L       f64      box length
    time    f64      snapshot time
    payload 7 arrays of n^3 f64 values each, order
            (varrho, u1, u2, u3, B1, B2, B3), x-index fastest

Snapshots hold physical-space values; reading returns a physical-
representation state, so write -> read -> write is byte-identical.

CSV series use a header row and one line per sample with 17 significant
digits, which round-trips float64 exactly.
"""

from __future__ import annotations

import struct

import numpy as np

from .model import FieldState
from .spectral import ScalarField, VectorField, build_grid

MAGIC = b"HMHD"
VERSION = 1
_HEADER = struct.Struct("<4sIIdd")

FIELD_ORDER = ("varrho", "u1", "u2", "u3", "B1", "B2", "B3")


class SnapshotFormatError(ValueError):
    """Base class for malformed snapshot files."""


class BadMagicError(SnapshotFormatError):
    pass


class SnapshotVersionError(SnapshotFormatError):
    pass


class TruncatedSnapshotError(SnapshotFormatError):
    pass


def snapshot_size(n: int) -> int:
    """Exact file size in bytes for a grid with n points per axis."""
    return _HEADER.size + 7 * n ** 3 * 8


def write_snapshot(state: FieldState, path: str) -> None:
    """Serialize a state (converted to physical values) to ``path``."""
    phys = state.to_physical()
    n = phys.grid.n
    arrays = [phys.varrho.data] + [phys.u.data[c] for c in range(3)] \
        + [phys.B.data[c] for c in range(3)]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, phys.grid.box_length, phys.time))
        for arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes(order="F"))


def read_snapshot(path: str) -> FieldState:
    """Deserialize a snapshot; returns a physical-representation state."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise TruncatedSnapshotError(
            f"{path}: {len(blob)} bytes is shorter than the {_HEADER.size}-byte header")
    magic, version, n, length, time = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotVersionError(
            f"{path}: unsupported format version {version}, expected {VERSION}")
    expected = snapshot_size(n)
    if len(blob) != expected:
        raise TruncatedSnapshotError(
            f"{path}: payload holds {len(blob)} bytes, expected {expected}")

    grid = build_grid(n, length)
    count = n ** 3
    arrays = []
    offset = _HEADER.size
    for _ in range(7):
        flat = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
        arrays.append(flat.reshape((n, n, n), order="F").copy())
        offset += count * 8
    return FieldState(
        grid, time,
        ScalarField.from_physical(grid, arrays[0]),
        VectorField.from_physical(grid, np.stack(arrays[1:4])),
        VectorField.from_physical(grid, np.stack(arrays[4:7])),
    )


# ---------------------------------------------------------------------------
# CSV series


def write_series_csv(rows: list[dict], path: str) -> None:
    """Header plus one line per sample; ``t`` first, 17 significant digits."""
    if rows:
        columns = [k for k in rows[0] if k != "t"]
        if "t" in rows[0]:
            columns = ["t"] + columns
        schema = set(rows[0])
        for i, row in enumerate(rows):
            if set(row) != schema:
                raise ValueError(f"row {i} does not share the series schema")
    else:
        columns = ["t"]
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(f"{row[c]:.17g}" for c in columns) + "\n")
    except OSError as err:
        raise OSError(f"failed writing series to {path}: {err}") from err


def read_series_csv(path: str) -> dict[str, np.ndarray]:
    """Parse a series CSV back into named columns."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: missing header row")
        columns = header.split(",")
        data: list[list[float]] = [[] for _ in columns]
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(columns):
                raise ValueError(
                    f"{path}:{lineno}: {len(parts)} fields, expected {len(columns)}")
            for slot, part in zip(data, parts):
                slot.append(float(part))
    return {name: np.array(vals) for name, vals in zip(columns, data)}

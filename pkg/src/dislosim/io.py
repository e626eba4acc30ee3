"""File formats: curve files, grid snapshots, and time-series CSV.

All formats round trip bit-identically through write/read.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import ConfigError
from .grid import PeriodicCell
from .measures import DislocationCurve

GRID_MAGIC = "dislosim-grid v1"
SERIES_COLUMNS = ("t", "psi", "dissipation", "max_div_residual",
                  "total_dislocation_weight")


def write_curves(path, curves):
    """Write dislocation curves as blank-line-separated vertex blocks.

    Each block starts with ``burgers bx by bz`` (plus an ``open`` token for
    non-closed curves) followed by one ``x y z`` vertex per line.
    """
    with open(path, "w") as fh:
        for i, c in enumerate(curves):
            if i:
                fh.write("\n")
            head = "burgers " + " ".join(repr(float(v)) for v in c.burgers)
            if not c.closed:
                head += " open"
            fh.write(head + "\n")
            for v in c.vertices:
                fh.write(" ".join(repr(float(x)) for x in v) + "\n")


def read_curves(path):
    with open(path) as fh:
        blocks = [b for b in fh.read().split("\n\n") if b.strip()]
    curves = []
    for block in blocks:
        lines = [ln for ln in block.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "burgers" or len(head) not in (4, 5):
            raise ConfigError(f"bad curve header in {path!r}: {lines[0]!r}")
        closed = True
        if len(head) == 5:
            if head[4] != "open":
                raise ConfigError(f"bad curve header token {head[4]!r}")
            closed = False
        burgers = np.array([float(v) for v in head[1:4]])
        verts = np.array([[float(x) for x in ln.split()] for ln in lines[1:]])
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise ConfigError(f"curve vertices in {path!r} are not 3-vectors")
        curves.append(DislocationCurve(verts, burgers, closed=closed))
    return curves


def write_grid_snapshot(path, cell: PeriodicCell, name, field):
    """Binary scalar-field snapshot.

    Layout: magic line, ``dims n1 n2 n3``, ``spacing h1 h2 h3``, ``field
    <name>``, then n1*n2*n3 little-endian float64 values with x1 varying
    fastest.
    """
    field = np.asarray(field, float)
    if field.shape != cell.shape:
        raise ConfigError("snapshot field shape does not match the cell grid")
    with open(path, "wb") as fh:
        fh.write((GRID_MAGIC + "\n").encode())
        fh.write(("dims %d %d %d\n" % cell.shape).encode())
        fh.write(("spacing %s %s %s\n" % tuple(
            repr(h) for h in cell.spacing)).encode())
        fh.write(f"field {name}\n".encode())
        fh.write(field.astype("<f8").tobytes(order="F"))


def read_grid_snapshot(path):
    """Return (cell, name, field) from a snapshot file."""
    with open(path, "rb") as fh:
        magic = fh.readline().decode().rstrip("\n")
        if magic != GRID_MAGIC:
            raise ConfigError(f"{path!r} is not a grid snapshot (magic {magic!r})")
        dims_line = fh.readline().decode().split()
        spacing_line = fh.readline().decode().split()
        field_line = fh.readline().decode().rstrip("\n").split(" ", 1)
        if dims_line[0] != "dims" or spacing_line[0] != "spacing" \
                or field_line[0] != "field":
            raise ConfigError(f"malformed snapshot header in {path!r}")
        shape = tuple(int(n) for n in dims_line[1:4])
        spacing = tuple(float(h) for h in spacing_line[1:4])
        name = field_line[1] if len(field_line) > 1 else ""
        raw = fh.read(8 * shape[0] * shape[1] * shape[2])
        if len(raw) != 8 * shape[0] * shape[1] * shape[2]:
            raise ConfigError(f"truncated snapshot payload in {path!r}")
    lengths = tuple(h * n for h, n in zip(spacing, shape))
    cell = PeriodicCell(lengths, shape)
    field = np.frombuffer(raw, dtype="<f8").reshape(shape, order="F")
    return cell, name, field.copy()


def write_time_series(path, rows):
    """CSV with columns t, psi, dissipation, max_div_residual,
    total_dislocation_weight."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SERIES_COLUMNS)
        for row in rows:
            if len(row) != len(SERIES_COLUMNS):
                raise ConfigError("time-series row has wrong number of columns")
            w.writerow([repr(float(v)) for v in row])


def read_time_series(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != SERIES_COLUMNS:
            raise ConfigError(f"unexpected time-series header {header!r}")
        return [tuple(float(v) for v in row) for row in r if row]

"""ASCII point-cloud file I/O: XYZ and vertex-only PLY.

Binary PLY is recognized and rejected with UnsupportedFormat; malformed
content raises DataError. Writers emit round-trippable ASCII with '.'
decimal separators and '\\n' line endings.
"""

import os

import numpy as np

from .cloud import PointCloud
from .errors import DataError, UnsupportedFormat

__all__ = ["load_cloud", "save_cloud", "load_xyz", "save_xyz", "load_ply", "save_ply"]

_PLY_FLOAT_TYPES = {"float", "float32", "double", "float64"}


def load_cloud(path):
    """Load a cloud, dispatching on the file extension (.xyz or .ply)."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".xyz":
        return load_xyz(path)
    if ext == ".ply":
        return load_ply(path)
    raise UnsupportedFormat(f"unknown point-cloud extension {ext!r}")


def save_cloud(cloud, path):
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".xyz":
        return save_xyz(cloud, path)
    if ext == ".ply":
        return save_ply(cloud, path)
    raise UnsupportedFormat(f"unknown point-cloud extension {ext!r}")


def load_xyz(path):
    """Read one 'x y z' triple per line; blank and '#' lines are skipped."""
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    return PointCloud(np.asarray(rows, dtype=np.float64).reshape(-1, 3))


def save_xyz(cloud, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for x, y, z in cloud.points.tolist():
            fh.write(f"{x!r} {y!r} {z!r}\n")


def _parse_ply_header(fh, path):
    magic = fh.readline().strip()
    if magic != "ply":
        raise DataError(f"{path}: missing 'ply' magic line")
    n_vertex = None
    properties = []
    current_element = None
    while True:
        line = fh.readline()
        if not line:
            raise DataError(f"{path}: truncated PLY header")
        parts = line.strip().split()
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "format":
            if len(parts) < 2 or parts[1] != "ascii":
                raise UnsupportedFormat(f"{path}: only ASCII PLY is supported")
        elif parts[0] == "element":
            if len(parts) != 3:
                raise DataError(f"{path}: malformed element line")
            current_element = parts[1]
            count = int(parts[2])
            if current_element == "vertex":
                if n_vertex is not None:
                    raise DataError(f"{path}: duplicate vertex element")
                n_vertex = count
            elif count != 0:
                raise DataError(f"{path}: unsupported element {parts[1]!r}")
        elif parts[0] == "property":
            if current_element == "vertex":
                if len(parts) != 3:
                    raise DataError(f"{path}: unsupported property layout")
                properties.append((parts[1], parts[2]))
        elif parts[0] == "end_header":
            break
        else:
            raise DataError(f"{path}: unexpected header line {parts[0]!r}")
    if n_vertex is None:
        raise DataError(f"{path}: no vertex element")
    names = [name for _, name in properties]
    for axis in ("x", "y", "z"):
        if axis not in names:
            raise DataError(f"{path}: vertex element lacks property {axis!r}")
        ptype = properties[names.index(axis)][0]
        if ptype not in _PLY_FLOAT_TYPES:
            raise DataError(f"{path}: property {axis!r} has non-float type {ptype!r}")
    cols = [names.index(a) for a in ("x", "y", "z")]
    return n_vertex, len(names), cols


def load_ply(path):
    """Read an ASCII PLY with a vertex-only element carrying float x,y,z."""
    # sniff for binary before text-mode parsing
    with open(path, "rb") as fh:
        head = fh.read(512)
    if b"binary_little_endian" in head or b"binary_big_endian" in head:
        raise UnsupportedFormat(f"{path}: binary PLY is not supported")
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        n_vertex, n_props, cols = _parse_ply_header(fh, path)
        rows = np.empty((n_vertex, 3), dtype=np.float64)
        for i in range(n_vertex):
            line = fh.readline()
            if not line:
                raise DataError(f"{path}: expected {n_vertex} vertices, got {i}")
            parts = line.split()
            if len(parts) != n_props:
                raise DataError(f"{path}: vertex row {i} has {len(parts)} fields")
            try:
                rows[i] = [float(parts[c]) for c in cols]
            except ValueError as exc:
                raise DataError(f"{path}: vertex row {i}: {exc}") from exc
    return PointCloud(rows)


def save_ply(cloud, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("ply\n")
        fh.write("format ascii 1.0\n")
        fh.write(f"element vertex {len(cloud)}\n")
        fh.write("property double x\nproperty double y\nproperty double z\n")
        fh.write("end_header\n")
        for x, y, z in cloud.points.tolist():
            fh.write(f"{x!r} {y!r} {z!r}\n")

# -*- coding: utf-8 -*-
"""
Exportadores de resultados: OBJ (ASCII), PLY (binario little-endian), CSV
(RFC 4180), volcados binarios de líneas y JSON canónico.

Todas las salidas son deterministas: mismos datos, mismos bytes.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path

import numpy as np

from wlab.complexkit import SampledLine
from wlab.errors import ExportError
from wlab.weierstrass import SurfaceMesh

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"


def _write_bytes(path, payload: bytes) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        raise ExportError(f"no se pudo escribir '{path}': {e}") from e
    logger.info("EXPORTACION: %d bytes en '%s'", len(payload), path)
    return path


def obj_bytes(mesh: SurfaceMesh) -> bytes:
    out = io.StringIO()
    out.write("# wlab surface mesh\n")
    for x, y, z in mesh.flat("positions"):
        out.write(f"v {x:.12g} {y:.12g} {z:.12g}\n")
    for nx, ny, nz in mesh.flat("normals"):
        out.write(f"vn {nx:.12g} {ny:.12g} {nz:.12g}\n")
    for face in mesh.faces() + 1:
        out.write("f " + " ".join(f"{i}//{i}" for i in face) + "\n")
    return out.getvalue().encode("ascii")


def write_obj(mesh: SurfaceMesh, path) -> Path:
    return _write_bytes(path, obj_bytes(mesh))


_VERTEX = np.dtype(
    [("x", "<f4"), ("y", "<f4"), ("z", "<f4"),
     ("nx", "<f4"), ("ny", "<f4"), ("nz", "<f4"),
     ("K", "<f4"), ("Lambda", "<f4")]
)
_FACE = np.dtype([("n", "u1"), ("v", "<i4", (4,))])


def ply_bytes(mesh: SurfaceMesh) -> bytes:
    """PLY binario con K y Λ por vértice en float32."""
    pos, nor = mesh.flat("positions"), mesh.flat("normals")
    verts = np.empty(pos.shape[0], dtype=_VERTEX)
    for i, name in enumerate(("x", "y", "z")):
        verts[name] = pos[:, i]
        verts["n" + name] = nor[:, i]
    verts["K"] = mesh.flat("curvature")
    verts["Lambda"] = mesh.flat("conformal")
    quads = mesh.faces()
    faces = np.empty(quads.shape[0], dtype=_FACE)
    faces["n"] = 4
    faces["v"] = quads
    header = "\n".join([
        "ply",
        "format binary_little_endian 1.0",
        f"element vertex {verts.size}",
        *(f"property float {name}" for name in _VERTEX.names),
        f"element face {faces.size}",
        "property list uchar int vertex_indices",
        "end_header",
    ]) + "\n"
    return header.encode("ascii") + verts.tobytes() + faces.tobytes()


def write_ply(mesh: SurfaceMesh, path) -> Path:
    return _write_bytes(path, ply_bytes(mesh))


def csv_bytes(header, rows) -> bytes:
    """CSV con separador coma y fin de línea CRLF."""
    out = io.StringIO(newline="")
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return out.getvalue().encode("utf-8")


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return repr(complex(value))
    return value


def write_csv(path, header, rows) -> Path:
    return _write_bytes(path, csv_bytes(header, rows))


def jacobi_rows(y, values, residual):
    """Filas (y, Re v, Im v, residuo) de un campo de Jacobi sobre una línea."""
    values = np.asarray(values, dtype=complex)
    res = np.broadcast_to(np.asarray(residual, dtype=float), values.shape)
    return ([float(a), float(b.real), float(b.imag), float(c)] for a, b, c in zip(y, values, res))


def line_bytes(line: SampledLine) -> bytes:
    """N como uint32 seguido de N pares complex64, todo little-endian."""
    return np.uint32(line.n).astype("<u4").tobytes() + line.values.astype("<c8").tobytes()


def read_line(payload: bytes, x0: float = 0.0, period: float = 1.0) -> SampledLine:
    n = int(np.frombuffer(payload[:4], dtype="<u4")[0])
    values = np.frombuffer(payload[4:], dtype="<c8", count=n)
    return SampledLine(x0, values.astype(complex), period=period)


def write_line(line: SampledLine, path) -> Path:
    return _write_bytes(path, line_bytes(line))


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"tipo no serializable: {type(obj).__name__}")


def json_bytes(payload: dict) -> bytes:
    """JSON canónico: claves ordenadas, UTF-8, sangría 2 y salto final."""
    text = json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2, default=_jsonable)
    return (text + "\n").encode("utf-8")


def write_json(payload: dict, path) -> Path:
    return _write_bytes(path, json_bytes(payload))

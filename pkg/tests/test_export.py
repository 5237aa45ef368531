import json

import numpy as np
import pytest

from wlab.catalog import make_catenoid
from wlab.complexkit import SampledLine
from wlab.errors import ExportError
from wlab.export import (
    csv_bytes,
    jacobi_rows,
    json_bytes,
    line_bytes,
    obj_bytes,
    ply_bytes,
    read_line,
    write_json,
    write_obj,
)
from wlab.weierstrass import ParamGrid, mesh


@pytest.fixture(scope="module")
def small_mesh():
    return mesh(make_catenoid(), ParamGrid((-1.0, 1.0), (0.0, 2 * np.pi), 4, 6, kind="log"))


def test_obj_layout(small_mesh):
    lines = obj_bytes(small_mesh).decode("ascii").splitlines()
    assert lines[0] == "# wlab surface mesh"
    assert sum(line.startswith("v ") for line in lines) == 5 * 7
    assert sum(line.startswith("vn ") for line in lines) == 5 * 7
    faces = [line for line in lines if line.startswith("f ")]
    assert len(faces) == 4 * 6
    assert faces[0] == "f 1//1 8//8 9//9 2//2"


def test_ply_header_and_size(small_mesh):
    payload = ply_bytes(small_mesh)
    header, body = payload.split(b"end_header\n", 1)
    assert header.startswith(b"ply\nformat binary_little_endian 1.0\n")
    assert b"element vertex 35\n" in header
    assert b"property float Lambda\n" in header
    assert b"element face 24\n" in header
    assert len(body) == 35 * 8 * 4 + 24 * (1 + 4 * 4)


def test_exports_are_deterministic(small_mesh, tmp_path):
    again = mesh(make_catenoid(), small_mesh.grid)
    assert obj_bytes(small_mesh) == obj_bytes(again)
    assert ply_bytes(small_mesh) == ply_bytes(again)
    first = write_obj(small_mesh, tmp_path / "a.obj").read_bytes()
    assert first == write_obj(again, tmp_path / "b.obj").read_bytes()


def test_csv_uses_crlf_and_repr():
    payload = csv_bytes(["t", "value", "z"], [[0.1, 2, 1 + 2j]])
    assert payload == b"t,value,z\r\n0.1,2,(1+2j)\r\n"


def test_jacobi_rows_split_real_and_imaginary():
    rows = list(jacobi_rows([0.0, 0.5], [1 + 2j, 3.0], 1e-9))
    assert rows == [[0.0, 1.0, 2.0, 1e-9], [0.5, 3.0, 0.0, 1e-9]]


def test_line_dump_layout():
    line = SampledLine(0.25, np.exp(2j * np.pi * np.arange(8) / 8))
    payload = line_bytes(line)
    assert len(payload) == 4 + 8 * 8
    assert payload[:4] == (8).to_bytes(4, "little")
    back = read_line(payload, x0=0.25)
    assert np.allclose(back.values, line.values, atol=1e-7)


def test_json_is_canonical():
    payload = {"b": np.float64(1.5), "a": [1 + 2j], "λ": np.arange(2)}
    text = json_bytes(payload).decode("utf-8")
    assert text.endswith("}\n")
    assert list(json.loads(text)) == ["a", "b", "λ"]
    assert json.loads(text)["a"] == [[1.0, 2.0]]
    assert json_bytes(payload) == json_bytes(dict(reversed(payload.items())))


def test_json_rejects_unknown_types():
    with pytest.raises(TypeError):
        json_bytes({"x": object()})


def test_write_failure_raises_export_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ExportError) as excinfo:
        write_json({}, blocker / "report.json")
    assert excinfo.value.exit_code == 3

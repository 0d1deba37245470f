import math
import os
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from rieszkit import io
from rieszkit.errors import FormatError
from rieszkit.fields import GridGeometry, ScalarField
from rieszkit.radon import Sinogram

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=40, deadline=None)
@given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=1, max_dims=3, min_side=2, max_side=5), elements=finite))
def test_rgf_round_trip(data):
    n = data.ndim
    geom = GridGeometry(data.shape, tuple(-0.5 * k for k in range(n)), tuple(0.1 + k for k in range(n)))
    field = ScalarField(geom, data)
    back = io.decode_rgf(io.encode_rgf(field))
    assert back.geometry == geom
    assert back.data.tobytes() == field.data.tobytes()


@settings(max_examples=40, deadline=None)
@given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=2, max_dims=2, min_side=2, max_side=6), elements=finite),
       st.floats(1e-3, 1e3))
def test_rsg_round_trip(data, s_max):
    sino = Sinogram(s_max, data)
    back = io.decode_rsg(io.encode_rsg(sino))
    assert back.s_max == sino.s_max
    assert back.data.tobytes() == sino.data.tobytes()


def test_rgf_layout():
    geom = GridGeometry((2, 3), (-1.0, 0.5), (0.25, 2.0))
    field = ScalarField(geom, np.arange(6.0).reshape(2, 3))
    buf = io.encode_rgf(field)
    assert buf[:8] == b"RGF1\0\0\0\0"
    assert struct.unpack_from("<3I", buf, 8) == (2, 2, 3)
    assert struct.unpack_from("<4d", buf, 20) == (-1.0, 0.5, 0.25, 2.0)
    assert np.frombuffer(buf[52:], "<f8").tolist() == [0, 1, 2, 3, 4, 5]
    assert len(buf) == 52 + 48


def test_rsg_layout():
    buf = io.encode_rsg(Sinogram(1.5, np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])))
    assert buf[:8] == b"RSG1\0\0\0\0"
    assert struct.unpack_from("<IId", buf, 8) == (3, 2, 1.5)
    # angle-major
    assert np.frombuffer(buf[24:], "<f8").tolist() == [1, 2, 3, 4, 5, 6]


def test_file_round_trip(tmp_path):
    geom = GridGeometry.centered(2, 4, 1.0)
    field = ScalarField(geom, np.random.default_rng(0).standard_normal((4, 4)))
    path = tmp_path / "f.rgf"
    io.write_rgf(path, field)
    assert io.read_rgf(path).data.tobytes() == field.data.tobytes()
    assert os.listdir(tmp_path) == ["f.rgf"]


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda b: b"XXXX" + b[4:], "not an RGF1"),
        (lambda b: b[:10], "truncated"),
        (lambda b: b[:-8], "expected"),
        (lambda b: b + b"\0" * 8, "expected"),
    ],
)
def test_rgf_corruption(mutate, message):
    field = ScalarField(GridGeometry.centered(1, 4, 1.0), np.zeros(4))
    with pytest.raises(FormatError, match=message):
        io.decode_rgf(mutate(io.encode_rgf(field)))


def test_rgf_rejects_bad_geometry():
    buf = b"RGF1\0\0\0\0" + struct.pack("<IIdd", 1, 3, 0.0, -1.0) + b"\0" * 24
    with pytest.raises(FormatError):
        io.decode_rgf(buf)


def test_rsg_corruption():
    buf = io.encode_rsg(Sinogram(1.0, np.zeros((2, 3))))
    with pytest.raises(FormatError, match="not an RSG1"):
        io.decode_rsg(io.encode_rgf(ScalarField(GridGeometry.centered(1, 2, 1.0), np.zeros(2))))
    with pytest.raises(FormatError):
        io.decode_rsg(buf[:-1])
    with pytest.raises(FormatError):
        io.decode_rsg(buf[:12])


def test_missing_file_names_path(tmp_path):
    path = tmp_path / "missing.rgf"
    with pytest.raises(FormatError, match="missing.rgf"):
        io.read_rgf(path)


def test_csv_precision(tmp_path):
    path = tmp_path / "r.csv"
    io.write_csv(path, [{"a": math.pi, "b": 1}, {"a": 0.1, "c": "x"}])
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b,c"
    assert lines[1] == "3.1415926535897931,1,"
    assert float(lines[2].split(",")[0]) == 0.1
    assert io.format_value(np.float64(1 / 3)) == "0.33333333333333331"


def test_failed_write_leaves_no_temp_file(tmp_path):
    class Boom(Exception):
        pass

    def payload(fh):
        raise Boom

    with pytest.raises(Boom):
        io._atomic_write(tmp_path / "x.bin", payload)
    assert os.listdir(tmp_path) == []

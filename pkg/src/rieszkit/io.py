"""Binary grid (RGF1) and sinogram (RSG1) files, and CSV reports.

RGF1 layout, little-endian::

    8 bytes  magic  b"RGF1\\0\\0\\0\\0"
    u32      n
    n x u32  shape
    n x f64  origin
    n x f64  spacing
    f64[]    data, C order

RSG1 layout, little-endian::

    8 bytes  magic  b"RSG1\\0\\0\\0\\0"
    u32 A, u32 S, f64 s_max
    f64[A*S] data, angle-major

All writes go to a temporary file in the target directory and are renamed
into place.
"""

from __future__ import annotations

import csv
import math
import os
import struct
import tempfile

import numpy as np

from .errors import FormatError
from .fields import GridGeometry, ScalarField
from .radon import Sinogram

RGF_MAGIC = b"RGF1\0\0\0\0"
RSG_MAGIC = b"RSG1\0\0\0\0"


def _atomic_write(path, payload, mode="wb"):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, **({} if "b" in mode else {"newline": ""})) as fh:
            if callable(payload):
                payload(fh)
            else:
                fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {os.fspath(path)}: {exc.strerror}") from exc


def encode_rgf(field):
    geom = field.geometry
    n = geom.n
    head = RGF_MAGIC + struct.pack(
        f"<I{n}I{n}d{n}d", n, *geom.shape, *geom.origin, *geom.spacing
    )
    return head + np.ascontiguousarray(field.data, dtype="<f8").tobytes()


def decode_rgf(buf, name="<bytes>"):
    if buf[:8] != RGF_MAGIC:
        raise FormatError(f"{name}: not an RGF1 file")
    try:
        (n,) = struct.unpack_from("<I", buf, 8)
        if n < 1:
            raise FormatError(f"{name}: dimension must be positive")
        pos = 12
        shape = struct.unpack_from(f"<{n}I", buf, pos)
        pos += 4 * n
        origin = struct.unpack_from(f"<{n}d", buf, pos)
        pos += 8 * n
        spacing = struct.unpack_from(f"<{n}d", buf, pos)
        pos += 8 * n
    except struct.error as exc:
        raise FormatError(f"{name}: truncated header") from exc
    count = math.prod(shape)
    if len(buf) - pos != 8 * count:
        raise FormatError(f"{name}: expected {count} values, found {(len(buf) - pos) / 8:g}")
    data = np.frombuffer(buf, dtype="<f8", count=count, offset=pos).astype(np.float64)
    try:
        return ScalarField(GridGeometry(shape, origin, spacing), data.reshape(shape))
    except ValueError as exc:
        raise FormatError(f"{name}: {exc}") from exc


def write_rgf(path, field):
    _atomic_write(path, encode_rgf(field))


def read_rgf(path):
    return decode_rgf(_read(path), os.fspath(path))


def encode_rsg(sino):
    a, s = sino.data.shape
    head = RSG_MAGIC + struct.pack("<IId", a, s, sino.s_max)
    return head + np.ascontiguousarray(sino.data, dtype="<f8").tobytes()


def decode_rsg(buf, name="<bytes>"):
    if buf[:8] != RSG_MAGIC:
        raise FormatError(f"{name}: not an RSG1 file")
    try:
        a, s, s_max = struct.unpack_from("<IId", buf, 8)
    except struct.error as exc:
        raise FormatError(f"{name}: truncated header") from exc
    pos = 24
    if len(buf) - pos != 8 * a * s:
        raise FormatError(f"{name}: expected {a * s} values, found {(len(buf) - pos) / 8:g}")
    data = np.frombuffer(buf, dtype="<f8", count=a * s, offset=pos).astype(np.float64)
    try:
        return Sinogram(s_max, data.reshape(a, s))
    except ValueError as exc:
        raise FormatError(f"{name}: {exc}") from exc


def write_rsg(path, sino):
    _atomic_write(path, encode_rsg(sino))


def read_rsg(path):
    return decode_rsg(_read(path), os.fspath(path))


def format_value(x):
    """Floats with 17 significant digits; everything else via ``str``."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, rows, columns=None):
    """Write dict rows; ``columns`` defaults to first-seen key order."""
    rows = list(rows)
    if columns is None:
        columns = []
        for row in rows:
            columns.extend(k for k in row if k not in columns)

    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c, "")) for c in columns])

    _atomic_write(path, emit, mode="w")

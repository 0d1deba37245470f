"""Uniform grids, sampled fields, grid convolution and error metrics.

Fields are zero outside their grid. Convolutions use the Riemann sum
``(f * g)(x_i) = sum_j f(y_j) g(x_i - y_j) * cell_volume``, which requires
the coordinate origin to be a grid node.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy import signal

from .errors import BoundaryWarning, DomainError, GeometryMismatch


def fft_workers():
    """Worker count for scipy.fft, from ``RIESZKIT_THREADS`` (0 or unset: all cores)."""
    raw = os.environ.get("RIESZKIT_THREADS", "0").strip() or "0"
    try:
        count = int(raw)
    except ValueError:
        return 1
    return -1 if count <= 0 else count


@dataclass(frozen=True)
class GridGeometry:
    shape: tuple
    origin: tuple
    spacing: tuple

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        origin = tuple(float(o) for o in self.origin)
        spacing = tuple(float(h) for h in self.spacing)
        if not (len(shape) == len(origin) == len(spacing)) or not shape:
            raise GeometryMismatch("shape, origin and spacing must have equal length")
        if min(shape) < 2:
            raise GeometryMismatch(f"need at least 2 points per axis, got {shape}")
        if min(spacing) <= 0:
            raise GeometryMismatch(f"spacing must be positive, got {spacing}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def centered(cls, n, points, half_width):
        """Cubic grid over ``[-half_width, half_width]^n`` with a node at 0.

        Even ``points`` gives nodes ``-half_width, ..., half_width - h`` with
        ``h = 2*half_width/points``; odd ``points`` includes both endpoints.
        """
        if points % 2:
            h = 2.0 * half_width / (points - 1)
            origin = -half_width
        else:
            h = 2.0 * half_width / points
            origin = -(points // 2) * h
        return cls((points,) * n, (origin,) * n, (h,) * n)

    @property
    def n(self):
        return len(self.shape)

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def axes(self):
        return [o + h * np.arange(s) for o, h, s in zip(self.origin, self.spacing, self.shape)]

    def mesh(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def radius2(self):
        """``|x|^2`` at every node, built by broadcasting the axes."""
        r2 = np.zeros(self.shape)
        for i, ax in enumerate(self.axes()):
            view = [1] * self.n
            view[i] = -1
            r2 = r2 + (ax**2).reshape(view)
        return r2

    def zero_index(self):
        """Index of the node at the coordinate origin."""
        idx = []
        for o, h, s in zip(self.origin, self.spacing, self.shape):
            k = -o / h
            kr = round(k)
            if abs(k - kr) > 1e-6 or not (0 <= kr < s):
                raise GeometryMismatch("the coordinate origin is not a grid node")
            idx.append(int(kr))
        return tuple(idx)

    def offsets(self):
        """Geometry of all pairwise node differences: ``2N-1`` points per axis."""
        return GridGeometry(
            tuple(2 * s - 1 for s in self.shape),
            tuple(-(s - 1) * h for s, h in zip(self.shape, self.spacing)),
            self.spacing,
        )

    def circumradius(self):
        """Largest distance from the coordinate origin to a grid corner."""
        far = [
            max(abs(o), abs(o + h * (s - 1)))
            for o, h, s in zip(self.origin, self.spacing, self.shape)
        ]
        return math.sqrt(sum(v * v for v in far))

    def central(self, fraction=0.5):
        """Slices selecting the central ``fraction`` of every axis."""
        out = []
        for s in self.shape:
            keep = max(1, int(round(s * fraction)))
            lo = (s - keep) // 2
            out.append(slice(lo, lo + keep))
        return tuple(out)

    def matches(self, other, rtol=1e-12):
        return (
            self.shape == other.shape
            and np.allclose(self.origin, other.origin, rtol=rtol, atol=rtol * max(self.spacing))
            and np.allclose(self.spacing, other.spacing, rtol=rtol, atol=0)
        )


def _require_same(f, g):
    if not f.geometry.matches(g.geometry):
        raise GeometryMismatch(f"geometries differ: {f.geometry} vs {g.geometry}")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values on the nodes of a :class:`GridGeometry` (read-only array)."""

    geometry: GridGeometry
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.size != self.geometry.size:
            raise GeometryMismatch(
                f"data has {data.size} values, geometry needs {self.geometry.size}"
            )
        data = data.reshape(self.geometry.shape)
        if not np.all(np.isfinite(data)):
            raise DomainError("field values must be finite")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, geometry):
        return cls(geometry, np.zeros(geometry.shape))

    def with_data(self, data):
        return ScalarField(self.geometry, data)

    def mass(self):
        """Grid integral with compensated summation."""
        return math.fsum(self.data.ravel()) * self.geometry.cell_volume

    def __add__(self, other):
        _require_same(self, other)
        return self.with_data(self.data + other.data)

    def __sub__(self, other):
        _require_same(self, other)
        return self.with_data(self.data - other.data)

    def __mul__(self, scalar):
        return self.with_data(self.data * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self.with_data(self.data / float(scalar))


def check_boundary_decay(field, tol=1e-6, what="field"):
    """Warn when ``field`` is not below ``tol * peak`` on the grid boundary.

    Returns the boundary-to-peak ratio.
    """
    data = np.abs(field.data)
    peak = data.max()
    if peak == 0:
        return 0.0
    edge = 0.0
    for axis in range(data.ndim):
        edge = max(edge, np.take(data, 0, axis=axis).max(), np.take(data, -1, axis=axis).max())
    ratio = float(edge / peak)
    if ratio > tol:
        warnings.warn(
            f"{what} reaches {ratio:.2e} of its peak on the grid boundary; "
            "zero extension truncates it",
            BoundaryWarning,
            stacklevel=3,
        )
    return ratio


class OffsetConvolver:
    """Convolve fixed node values with many kernels on ``geometry.offsets()``.

    The transform of the data is computed once; each :meth:`apply` costs one
    forward and one inverse FFT.
    """

    def __init__(self, data, geometry):
        self.geometry = geometry
        self.data = np.asarray(data, dtype=float)
        self._kshape = geometry.offsets().shape
        full = tuple(s + k - 1 for s, k in zip(geometry.shape, self._kshape))
        self._fshape = tuple(scipy.fft.next_fast_len(s, real=True) for s in full)
        with scipy.fft.set_workers(fft_workers()):
            self._dhat = scipy.fft.rfftn(self.data, s=self._fshape)

    def apply(self, kernel):
        if kernel.shape != self._kshape:
            raise GeometryMismatch(f"kernel shape {kernel.shape} != offsets shape {self._kshape}")
        with scipy.fft.set_workers(fft_workers()):
            khat = scipy.fft.rfftn(kernel, s=self._fshape)
            full = scipy.fft.irfftn(self._dhat * khat, s=self._fshape)
        crop = tuple(slice(s - 1, 2 * s - 1) for s in self.geometry.shape)
        return full[crop] * self.geometry.cell_volume


def convolve_offsets(data, kernel, geometry, method="fft"):
    """Convolve node values with a kernel sampled on ``geometry.offsets()``.

    Returns an array on ``geometry``: ``sum_j data[j] kernel[i - j] * dV``.
    """
    expected = geometry.offsets().shape
    if kernel.shape != expected:
        raise GeometryMismatch(f"kernel shape {kernel.shape} != offsets shape {expected}")
    if method == "fft":
        return OffsetConvolver(data, geometry).apply(kernel)
    if method != "direct":
        raise ValueError(f"unknown convolution method {method!r}")
    full = signal.convolve(data, kernel, mode="full", method="direct")
    crop = tuple(slice(s - 1, 2 * s - 1) for s in geometry.shape)
    return full[crop] * geometry.cell_volume


def convolve(f, g, method="fft"):
    """Riemann-sum convolution of two fields on the same geometry.

    ``g`` is read as a function of the offset ``x - y``; offsets outside
    its grid count as zero, so both fields should be supported well inside
    the grid.
    """
    _require_same(f, g)
    geom = f.geometry
    zero = geom.zero_index()
    if method == "fft":
        with scipy.fft.set_workers(fft_workers()):
            full = signal.fftconvolve(f.data, g.data, mode="full")
    elif method == "direct":
        full = signal.convolve(f.data, g.data, mode="full", method="direct")
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    crop = tuple(slice(z, z + s) for z, s in zip(zero, geom.shape))
    return f.with_data(full[crop] * geom.cell_volume)


def phantom(kind, geometry, sigma=1.0, rho=1.0, width=None, spec=None, center=None):
    """Sample a test function on ``geometry``.

    Parameters
    ----------
    kind : {"gaussian", "disk", "smooth_disk", "kernel_w", "kernel_h"}
        ``gaussian`` is ``exp(-|x-c|^2 / sigma^2)``; ``disk`` the indicator of
        the ball of radius ``rho``; ``smooth_disk`` a tanh-edged disk of edge
        ``width`` (default two cells); ``kernel_w``/``kernel_h`` the
        reconstructing kernel and its Riesz image for ``spec``.
    """
    if kind in ("gaussian", "disk", "smooth_disk"):
        c = np.zeros(geometry.n) if center is None else np.asarray(center, dtype=float)
        r2 = np.zeros(geometry.shape)
        for i, ax in enumerate(geometry.axes()):
            view = [1] * geometry.n
            view[i] = -1
            r2 = r2 + ((ax - c[i]) ** 2).reshape(view)
        if kind == "gaussian":
            if sigma <= 0:
                raise DomainError("sigma must be positive")
            return ScalarField(geometry, np.exp(-r2 / sigma**2))
        if rho <= 0:
            raise DomainError("rho must be positive")
        if kind == "disk":
            return ScalarField(geometry, (r2 <= rho**2).astype(float))
        w = 2.0 * max(geometry.spacing) if width is None else width
        return ScalarField(geometry, 0.5 * (1.0 - np.tanh((np.sqrt(r2) - rho) / w)))
    if kind in ("kernel_w", "kernel_h"):
        from . import radial_kernels

        if spec is None:
            raise DomainError(f"phantom {kind!r} needs a KernelSpec")
        build = radial_kernels.build_w if kind == "kernel_w" else radial_kernels.build_h
        return radial_kernels.sample_scaled(build(spec), 1.0, geometry)
    raise DomainError(f"unknown phantom kind {kind!r}")


@dataclass(frozen=True)
class Metrics:
    sup_err: float
    l2_rel: float
    l1_rel: float
    relative: bool = True

    def as_dict(self):
        return {
            "sup_err": self.sup_err,
            "l2_rel": self.l2_rel,
            "l1_rel": self.l1_rel,
            "relative": self.relative,
        }


def metrics(f, g, region=None):
    """Errors of ``f`` against the reference ``g``.

    ``region`` is an optional tuple of slices. When ``g`` vanishes on the
    region, absolute norms are returned and ``relative`` is False.
    """
    _require_same(f, g)
    a = f.data if region is None else f.data[region]
    b = g.data if region is None else g.data[region]
    diff = (a - b).ravel()
    dv = f.geometry.cell_volume
    l2 = math.sqrt(math.fsum(diff * diff) * dv)
    l1 = math.fsum(np.abs(diff)) * dv
    ref2 = math.sqrt(math.fsum(b.ravel() ** 2) * dv)
    ref1 = math.fsum(np.abs(b).ravel()) * dv
    sup = float(np.max(np.abs(diff))) if diff.size else 0.0
    if ref2 == 0.0:
        return Metrics(sup, l2, l1, relative=False)
    return Metrics(sup, l2 / ref2, l1 / ref1)


def l2_rel(f, g, region=None):
    return metrics(f, g, region).l2_rel

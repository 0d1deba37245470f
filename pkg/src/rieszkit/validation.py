"""Input coercion shared by the estimators and the command line."""

import math

import numpy as np

from .errors import DomainError, GeometryMismatch
from .fields import GridGeometry, ScalarField
from .radon import Sinogram


def check_field(X, geometry=None, name="X"):
    """Return ``X`` as a :class:`ScalarField`.

    Plain arrays need ``geometry``; a field whose geometry disagrees with a
    given ``geometry`` raises :class:`GeometryMismatch`.
    """
    if isinstance(X, ScalarField):
        if geometry is not None and not X.geometry.matches(geometry):
            raise GeometryMismatch(f"{name} does not live on the expected grid")
        return X
    if geometry is None:
        raise DomainError(f"{name} is a bare array; pass geometry= to place it on a grid")
    if not isinstance(geometry, GridGeometry):
        raise TypeError("geometry must be a GridGeometry")
    data = np.asarray(X, dtype=np.float64)
    if data.shape != tuple(geometry.shape):
        raise GeometryMismatch(f"{name} has shape {data.shape}, grid is {tuple(geometry.shape)}")
    return ScalarField(geometry, data)


def check_sinogram(X, s_max=None, name="X"):
    if isinstance(X, Sinogram):
        return X
    if s_max is None:
        raise DomainError(f"{name} is a bare array; pass s_max= to fix its offsets")
    return Sinogram(s_max, X)


def check_scales(values, name="t_list"):
    """Strictly decreasing positive floats."""
    out = [float(v) for v in np.atleast_1d(values)]
    if not out:
        raise DomainError(f"{name} is empty")
    if any(not (v > 0 and math.isfinite(v)) for v in out):
        raise DomainError(f"{name} must hold positive finite values")
    if any(b >= a for a, b in zip(out, out[1:])):
        raise DomainError(f"{name} must be strictly decreasing")
    return out


def unwrap_like(template, field):
    """Return ``field`` in the same container kind as ``template``."""
    if isinstance(template, (ScalarField, Sinogram)):
        return field
    return np.array(field.data)

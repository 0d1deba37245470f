"""scikit-learn style wrappers around the operators.

Each estimator accepts a :class:`ScalarField` (or a bare array together with
``geometry``) and returns the same kind of container it was given. ``fit``
only validates and records the grid; none of the operators learn anything
from data.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import constants
from .inversion import invert_approx, invert_wavelet_quadrature
from .radon import dual_radon_2d, radon_2d, reconstruct_radon
from .riesz import riesz_quadrature, riesz_spectral
from .validation import check_field, check_scales, check_sinogram, unwrap_like


class _GridTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        field = check_field(X, self.geometry)
        self.geometry_ = field.geometry
        self._validate(field)
        return self

    def _validate(self, field):
        pass

    def _field(self, X):
        check_is_fitted(self, "geometry_")
        return check_field(X, self.geometry_ if self.geometry is not None else None)


class RieszPotential(_GridTransformer):
    """Forward Riesz potential ``I^alpha``.

    Parameters
    ----------
    alpha : float
    method : {"quadrature", "spectral"}
    pad : int
        Zero padding factor of the spectral method.
    dc : {"neighbors", "cell_mean"}
        Zero-frequency rule of the spectral method.
    geometry : GridGeometry, optional
        Needed when passing bare arrays.
    """

    def __init__(self, alpha=1.0, method="quadrature", pad=4, dc="neighbors", geometry=None):
        self.alpha = alpha
        self.method = method
        self.pad = pad
        self.dc = dc
        self.geometry = geometry

    def _validate(self, field):
        if self.method not in ("quadrature", "spectral"):
            raise ValueError(f"unknown method {self.method!r}")
        constants.KernelSpec(field.geometry.n, self.alpha)

    def transform(self, X):
        field = self._field(X)
        if self.method == "spectral":
            out = riesz_spectral(field, self.alpha, pad=self.pad, dc=self.dc)
        else:
            out = riesz_quadrature(field, self.alpha)
        return unwrap_like(X, out)


class RieszInverse(_GridTransformer):
    """Recover ``f`` from ``I^alpha f``.

    ``formula="approx"`` keeps the finest of ``t_list``; ``"wavelet"``
    integrates scales from ``eps`` to ``T``. The last report is kept in
    ``report_``.
    """

    def __init__(
        self,
        alpha=1.0,
        m=None,
        formula="approx",
        t_list=(1.0, 0.5, 0.25),
        eps=0.05,
        T=None,
        n_nodes=80,
        geometry=None,
    ):
        self.alpha = alpha
        self.m = m
        self.formula = formula
        self.t_list = t_list
        self.eps = eps
        self.T = T
        self.n_nodes = n_nodes
        self.geometry = geometry

    def _validate(self, field):
        if self.formula not in ("approx", "wavelet"):
            raise ValueError(f"unknown formula {self.formula!r}")
        self.spec_ = constants.KernelSpec(field.geometry.n, self.alpha, self.m)
        if self.formula == "approx":
            check_scales(self.t_list)
            self.constant_ = self.spec_.c
        else:
            self.constant_ = self.spec_.d

    def transform(self, X):
        field = self._field(X)
        if self.formula == "approx":
            outs, self.report_ = invert_approx(field, self.spec_, check_scales(self.t_list))
            out = outs[-1]
        else:
            out, self.report_ = invert_wavelet_quadrature(
                field, self.spec_, self.eps, T=self.T, n_nodes=self.n_nodes
            )
        return unwrap_like(X, out)


class RadonTransform(_GridTransformer):
    """Planar line integrals; ``transform`` returns a sinogram (or its data)."""

    def __init__(self, n_angles=None, geometry=None):
        self.n_angles = n_angles
        self.geometry = geometry

    def transform(self, X):
        sino = radon_2d(self._field(X), n_angles=self.n_angles)
        self.s_max_ = sino.s_max
        return sino.data.copy() if isinstance(X, np.ndarray) else sino

    def backproject(self, phi):
        """Dual transform onto the fitted grid."""
        check_is_fitted(self, "geometry_")
        sino = check_sinogram(phi, getattr(self, "s_max_", None))
        out = dual_radon_2d(sino, self.geometry_)
        return out if not isinstance(phi, np.ndarray) else np.array(out.data)


class RadonReconstructor(BaseEstimator):
    """Backprojection followed by Riesz inversion of order one.

    ``geometry`` (the output grid) is required. ``transform`` takes a
    :class:`Sinogram`, or an array with ``s_max``.
    """

    def __init__(
        self,
        geometry=None,
        formula="approx",
        t_list=(1.0, 0.5, 0.25),
        eps=0.05,
        T=None,
        pad=3,
        s_max=None,
    ):
        self.geometry = geometry
        self.formula = formula
        self.t_list = t_list
        self.eps = eps
        self.T = T
        self.pad = pad
        self.s_max = s_max

    def fit(self, X=None, y=None):
        if self.geometry is None:
            raise ValueError("RadonReconstructor needs geometry")
        if self.formula not in ("approx", "wavelet"):
            raise ValueError(f"unknown formula {self.formula!r}")
        if self.formula == "approx":
            check_scales(self.t_list)
        self.spec_ = constants.KernelSpec(2, 1.0)
        self.geometry_ = self.geometry
        return self

    def transform(self, X):
        check_is_fitted(self, "geometry_")
        sino = check_sinogram(X, self.s_max)
        out, self.report_ = reconstruct_radon(
            sino,
            self.geometry_,
            self.spec_,
            formula=self.formula,
            t_list=self.t_list,
            eps=self.eps,
            T=self.T,
            pad=self.pad,
        )
        return out if not isinstance(X, np.ndarray) else np.array(out.data)

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)

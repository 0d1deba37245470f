"""Forward Riesz potential ``I^alpha`` on sampled fields.

Two independent discretizations:

* :func:`riesz_quadrature` -- Riemann sum of ``f(y) |x-y|^(alpha-n) / gamma_n(alpha)``
  where the singular cell is replaced by the exact integral over the ball of
  the same volume.
* :func:`riesz_spectral` -- Fourier multiplier ``|xi|^(-alpha)`` on a
  zero-padded periodic grid.
"""

import itertools

import numpy as np
import scipy.fft

from . import constants
from .errors import DomainError
from .fields import check_boundary_decay, convolve_offsets, fft_workers


def _check_alpha(alpha, n):
    if not (0.0 < alpha < n):
        raise DomainError(f"alpha must lie in (0, {n}), got {alpha!r}")


def riesz_kernel(geometry, alpha):
    """Quadrature weights of the Riesz kernel on ``geometry.offsets()``.

    Multiplied by the cell volume in the convolution; the centre entry holds
    ``sigma_(n-1) rho^alpha / (alpha gamma_n(alpha))`` divided by the cell
    volume, ``rho`` being the radius of the ball with the cell's volume.
    """
    n = geometry.n
    gn = constants.gamma_n(n, alpha)
    off = geometry.offsets()
    r2 = off.radius2()
    zero = off.zero_index()
    r2[zero] = 1.0
    kernel = r2 ** ((alpha - n) / 2.0) / gn
    dv = geometry.cell_volume
    ball_volume = constants.sigma(n - 1) / n
    rho = (dv / ball_volume) ** (1.0 / n)
    kernel[zero] = constants.sigma(n - 1) * rho**alpha / (alpha * gn) / dv
    return kernel


def riesz_quadrature(f, alpha, method="fft"):
    """Riesz potential of order ``alpha`` by singular-corrected Riemann sum.

    Parameters
    ----------
    f : ScalarField
        Input, assumed zero outside its grid.
    alpha : float
        Order in ``(0, n)``.
    method : {"fft", "direct"}
        How the discrete convolution is evaluated.
    """
    n = f.geometry.n
    _check_alpha(alpha, n)
    check_boundary_decay(f, what="riesz input")
    kernel = riesz_kernel(f.geometry, alpha)
    return f.with_data(convolve_offsets(f.data, kernel, f.geometry, method))


def dc_cell_mean(deltas, alpha, order=24):
    """Mean of ``|xi|^(-alpha)`` over the box ``prod [-d_i/2, d_i/2]``.

    Each orthant is split into pyramids by its largest scaled coordinate;
    the radial factor integrates in closed form and the remaining smooth
    factor by tensor Gauss-Legendre.
    """
    n = len(deltas)
    x, wts = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    wts = 0.5 * wts
    total = 0.0
    for lead in range(n):
        others = [i for i in range(n) if i != lead]
        acc = 0.0
        for idx in itertools.product(range(order), repeat=n - 1):
            q = deltas[lead] ** 2 + sum((deltas[o] * x[k]) ** 2 for o, k in zip(others, idx))
            acc += np.prod([wts[k] for k in idx]) * q ** (-alpha / 2.0)
        total += acc * 0.5 ** (n - alpha) / (n - alpha)
    return total * 2**n


def riesz_spectral(f, alpha, pad=4, dc="neighbors"):
    """Riesz potential via the multiplier ``|xi|^(-alpha)`` on a padded grid.

    ``f`` is zero-padded to ``pad`` times its size per axis. The undefined
    zero-frequency multiplier is the mean of its nearest neighbours
    (``dc="neighbors"``) or the exact mean of ``|xi|^(-alpha)`` over the
    zero-frequency cell (``dc="cell_mean"``). The result carries the bias of
    the periodic extension; for inputs with nonzero mass ``cell_mean`` is
    much closer to the free-space potential.
    """
    n = f.geometry.n
    _check_alpha(alpha, n)
    if pad < 4:
        raise DomainError("spectral Riesz potential needs padding >= 4")
    check_boundary_decay(f, what="riesz input")
    geom = f.geometry
    padded = tuple(pad * s for s in geom.shape)
    xi2 = np.zeros(padded[:-1] + (padded[-1] // 2 + 1,))
    neighbours = []
    for axis, (m, h) in enumerate(zip(padded, geom.spacing)):
        if axis == n - 1:
            freq = 2.0 * np.pi * scipy.fft.rfftfreq(m, d=h)
        else:
            freq = 2.0 * np.pi * scipy.fft.fftfreq(m, d=h)
        view = [1] * n
        view[axis] = -1
        xi2 = xi2 + (freq**2).reshape(view)
        neighbours.append(abs(freq[1]) ** (-alpha))
    zero_bin = (0,) * n
    xi2[zero_bin] = 1.0
    mult = xi2 ** (-alpha / 2.0)
    if dc == "neighbors":
        mult[zero_bin] = float(np.mean(neighbours))
    elif dc == "cell_mean":
        deltas = [2.0 * np.pi / (m * h) for m, h in zip(padded, geom.spacing)]
        mult[zero_bin] = dc_cell_mean(deltas, alpha)
    else:
        raise ValueError(f"unknown zero-frequency rule {dc!r}")
    with scipy.fft.set_workers(fft_workers()):
        spec = scipy.fft.rfftn(f.data, s=padded)
        out = scipy.fft.irfftn(spec * mult, s=padded)
    crop = tuple(slice(0, s) for s in geom.shape)
    return f.with_data(out[crop])

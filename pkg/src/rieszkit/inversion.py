"""Recover ``f`` from ``g = I^alpha f`` with the elementary reconstructing kernels.

Two inversion formulas are provided:

* single scale: ``c f ~ g * t^(-alpha) w_t`` as ``t -> 0``
  (:func:`invert_approx`);
* scale integral: ``d f = int_0^inf (g * w_tilde_t) t^(-1-alpha) dt``
  (:func:`invert_wavelet_quadrature`).

Both reduce to convolving the unknown ``f`` with an approximate identity,
``h_t / c`` and ``psi_eps / d`` respectively; :func:`invert_psi` evaluates the
latter directly from a known reference and serves as a test oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from . import constants
from .errors import GeometryMismatch, ModeError, QuadratureWarning, ResolutionWarning, DomainError
from .fields import OffsetConvolver, ScalarField, metrics
from .radial_kernels import (
    build_psi,
    build_w,
    build_w_tilde,
    radial_integral,
    sample_radial,
    scale_integrated_kernel,
    scaled_kernel_values,
)

CELL_ORDER = 4


@dataclass
class ReconstructionReport:
    """Scales visited by an inversion and the errors measured at each."""

    spec: constants.KernelSpec
    scales: list
    method: str
    constant: float
    errors_per_scale: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        s = list(self.scales)
        if any(b >= a for a, b in zip(s, s[1:])):
            raise DomainError("scales must be strictly decreasing")

    def rows(self):
        """One dict per scale, for CSV output."""
        out = []
        for i, t in enumerate(self.scales):
            row = {"method": self.method, "scale": t, "constant": self.constant}
            if i < len(self.errors_per_scale) and self.errors_per_scale[i] is not None:
                row.update(self.errors_per_scale[i].as_dict())
            out.append(row)
        return out


def _check_inputs(g, spec):
    if g.geometry.n != spec.n:
        raise GeometryMismatch(f"field is {g.geometry.n}-D but spec has n={spec.n}")


def _width(geometry):
    return min(h * s for h, s in zip(geometry.spacing, geometry.shape))


def _cell_order(t, geometry):
    return CELL_ORDER if t < 4 * max(geometry.spacing) else 2


def invert_approx(g, spec, t_list, reference=None, constant=None):
    """Single-scale inversion ``(g * t^(-alpha) w_t) / c`` for each ``t``.

    Parameters
    ----------
    g : ScalarField
        Sampled ``I^alpha f``.
    spec : KernelSpec
    t_list : sequence of float
        Strictly decreasing scales in ``(0, width/4]``.
    reference : ScalarField, optional
        Known ``f``; when given, errors per scale are recorded.
    constant : float, optional
        Overrides ``c_(alpha,m)`` (the Radon pipeline divides by ``lambda_k``).

    Returns
    -------
    list of ScalarField, ReconstructionReport
        One reconstruction per scale; the last is the finest.
    """
    _check_inputs(g, spec)
    t_list = [float(t) for t in t_list]
    limit = _width(g.geometry) / 4.0
    if not t_list or min(t_list) <= 0 or max(t_list) > limit * (1 + 1e-12):
        raise DomainError(f"scales must lie in (0, {limit}]")
    c = spec.c if constant is None else float(constant)
    report = ReconstructionReport(spec, t_list, "approx", c)
    w = build_w(spec)
    conv = OffsetConvolver(g.data, g.geometry)
    out = []
    for t in t_list:
        kernel = t ** (-spec.alpha) * scaled_kernel_values(w, t, g.geometry, _cell_order(t, g.geometry))
        rec = g.with_data(conv.apply(kernel) / c)
        out.append(rec)
        report.errors_per_scale.append(None if reference is None else metrics(rec, reference))
    return out, report


def tail_bound(g, spec, T):
    """Pointwise bound on the neglected ``int_T^inf`` part of the scale integral.

    Cauchy-Schwarz gives ``|g * w_tilde_t| <= ||g||_2 ||w_tilde||_2 t^(-n/2)``,
    so the tail is at most ``||g||_2 ||w_tilde||_2 T^(-n/2-alpha) / (n/2+alpha)``
    before division by ``d``.
    """
    n, alpha = spec.n, spec.alpha
    wt = build_w_tilde(spec)
    sq = type(wt)(
        tuple(np.polynomial.polynomial.polymul(wt.float_coeffs(), wt.float_coeffs())),
        2 * wt.gamma_exp,
    )
    wt_norm = math.sqrt(radial_integral(sq, n))
    g_norm = math.sqrt(math.fsum(g.data.ravel() ** 2) * g.geometry.cell_volume)
    return g_norm * wt_norm * T ** (-n / 2.0 - alpha) / (n / 2.0 + alpha)


def invert_wavelet_quadrature(
    g, spec, eps, T=None, n_nodes=80, tail="kernel", reference=None, constant=None
):
    """Scale-integral inversion ``d^-1 int_eps^inf (g * w_tilde_t) t^(-1-alpha) dt``.

    The integral over ``[eps, T]`` uses the trapezoid rule in ``log t`` on
    ``n_nodes`` log-spaced scales. The remainder over ``(T, inf)`` is either
    added as one convolution with the exactly scale-integrated kernel
    (``tail="kernel"``) or dropped (``tail="none"``), in which case a
    :class:`QuadratureWarning` is issued if its bound exceeds 1% of the
    result's sup norm.

    Returns
    -------
    ScalarField, ReconstructionReport
    """
    _check_inputs(g, spec)
    geom = g.geometry
    if T is None:
        T = _width(geom) / 4.0
    if not (0 < eps < T):
        raise DomainError(f"need 0 < eps < T, got eps={eps}, T={T}")
    if n_nodes < 2:
        raise DomainError("need at least two quadrature nodes")
    if tail not in ("kernel", "none"):
        raise ValueError(f"unknown tail mode {tail!r}")
    n, alpha = spec.n, spec.alpha
    d = spec.d if constant is None else float(constant)
    wt = build_w_tilde(spec)
    conv = OffsetConvolver(g.data, geom)

    logs = np.linspace(math.log(eps), math.log(T), n_nodes)
    step = logs[1] - logs[0]
    acc = np.zeros(geom.shape)
    for k, lt in enumerate(logs):
        t = math.exp(lt)
        weight = step * (0.5 if k in (0, n_nodes - 1) else 1.0)
        kernel = scaled_kernel_values(wt, t, geom, _cell_order(t, geom))
        acc += weight * t ** (-alpha) * conv.apply(kernel)

    bound = tail_bound(g, spec, T) / d
    if tail == "kernel":
        tail_fn = scale_integrated_kernel(wt, n, alpha, T)
        kernel = sample_radial(tail_fn, geom.offsets(), _cell_order(T, geom), width=T)
        acc += conv.apply(kernel)
    result = g.with_data(acc / d)

    peak = float(np.max(np.abs(result.data))) if result.data.size else 0.0
    if tail == "none" and bound > 0.01 * peak:
        warnings.warn(
            f"neglected scale tail beyond T={T} may reach {bound:.3e} "
            f"({bound / peak if peak else math.inf:.1%} of the result)",
            QuadratureWarning,
            stacklevel=2,
        )
    report = ReconstructionReport(
        spec,
        [eps],
        "wavelet",
        d,
        [None if reference is None else metrics(result, reference)],
        {"T": T, "n_nodes": n_nodes, "tail": tail, "tail_bound": bound},
    )
    return result, report


def invert_psi(g, spec, eps, f_reference=None):
    """Oracle for the scale integral: ``f_reference * psi_eps / d``.

    The truncated scale integral equals ``f * psi_eps`` exactly, but ``f``
    is the unknown, so this needs the reference and is not an inverter.

    Raises
    ------
    ModeError
        When called without ``f_reference``.
    """
    if f_reference is None:
        raise ModeError("invert_psi needs f_reference; it is a test oracle, not an inverter")
    _check_inputs(f_reference, spec)
    if g is not None and not g.geometry.matches(f_reference.geometry):
        raise GeometryMismatch("g and f_reference must share a geometry")
    if eps <= 0:
        raise DomainError("eps must be positive")
    geom = f_reference.geometry
    kernel = scaled_kernel_values(build_psi(spec), eps, geom, _cell_order(eps, geom))
    return f_reference.with_data(OffsetConvolver(f_reference.data, geom).apply(kernel) / spec.d)


def approximate_identity(f, spec, t):
    """``f * h_t / c``: what :func:`invert_approx` returns when ``g = I^alpha f``."""
    from .radial_kernels import build_h

    kernel = scaled_kernel_values(build_h(spec), t, f.geometry, _cell_order(t, f.geometry))
    return f.with_data(OffsetConvolver(f.data, f.geometry).apply(kernel) / spec.c)


# Fourier-side checks ---------------------------------------------------------


def _smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
    b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def _window_radii(geometry):
    reach = min(
        min(abs(o), abs(o + h * (s - 1)))
        for o, h, s in zip(geometry.origin, geometry.spacing, geometry.shape)
    )
    return 0.5 * reach, 0.95 * reach


def _hankel_tail(profile, n, rho, r_in, r_out):
    """Fourier transform at ``|xi| = rho`` of ``(1 - window) * profile``.

    The window is 1 inside ``r_in`` and 0 beyond ``r_out``. The oscillatory
    integral beyond ``r_out`` is summed in half-period chunks and the last
    two partial sums are averaged.
    """
    nu = n / 2.0 - 1.0

    def outer(s):
        return float(_smooth_step((s - r_in) / (r_out - r_in)))

    if rho == 0.0:
        def integrand(s):
            return outer(s) * profile(s * s) * s ** (n - 1)

        head, _ = integrate.quad(integrand, r_in, r_out, limit=200, epsabs=1e-14)
        far, _ = integrate.quad(lambda s: profile(s * s) * s ** (n - 1), r_out, np.inf, limit=400, epsabs=1e-14)
        return constants.sigma(n - 1) * (head + far)

    def integrand(s):
        return outer(s) * profile(s * s) * special.jv(nu, rho * s) * s ** (n / 2.0)

    def plain(s):
        return profile(s * s) * special.jv(nu, rho * s) * s ** (n / 2.0)

    total, _ = integrate.quad(integrand, r_in, r_out, limit=400, epsabs=1e-14)
    chunk = math.pi / rho
    lo = r_out
    prev = None
    scale = abs(total) + 1e-300
    for _ in range(20000):
        piece, _ = integrate.quad(plain, lo, lo + chunk, limit=200, epsabs=1e-15)
        prev, total = total, total + piece
        lo += chunk
        scale = max(scale, abs(total))
        if abs(piece) < 1e-9 * scale:
            break
    total = 0.5 * (total + prev)
    return (2.0 * math.pi) ** (n / 2.0) * rho ** (-nu) * total


def _windowed_samples(profile, geometry):
    r_in, r_out = _window_radii(geometry)
    r2 = geometry.radius2()
    win = 1.0 - _smooth_step((np.sqrt(r2) - r_in) / (r_out - r_in))
    return win * profile(r2), (r_in, r_out)


def wavelet_transform_at(spec, geometry, rho_values):
    """Fourier transform of ``w`` at radial frequencies ``rho_values``.

    The windowed grid samples are transformed by a direct sum along the first
    axis; the part of ``w`` outside the window is added by a Hankel transform
    of the analytic profile.
    """
    w = build_w(spec)
    samples, (r_in, r_out) = _windowed_samples(w, geometry)
    ax0 = geometry.axes()[0]
    view = [-1] + [1] * (geometry.n - 1)
    out = []
    for rho in rho_values:
        phase = np.cos(rho * ax0).reshape(view)
        grid_part = math.fsum((samples * phase).ravel()) * geometry.cell_volume
        out.append(grid_part + _hankel_tail(w, spec.n, float(rho), r_in, r_out))
    return np.array(out)


def _spectrum(profile, geometry):
    """Radial frequencies and real transform of the windowed samples on the FFT grid."""
    samples, _ = _windowed_samples(profile, geometry)
    spec = np.fft.fftn(samples)
    xi2 = np.zeros(geometry.shape)
    phase = np.zeros(geometry.shape)
    for axis, (m, h, o) in enumerate(zip(geometry.shape, geometry.spacing, geometry.origin)):
        xi = -2.0 * np.pi * np.fft.fftfreq(m, d=h)
        view = [1] * geometry.n
        view[axis] = -1
        xi2 = xi2 + (xi**2).reshape(view)
        phase = phase + (o * xi).reshape(view)
    values = np.real(np.exp(1j * phase) * spec) * geometry.cell_volume
    dxi = np.prod([2.0 * np.pi / (m * h) for m, h in zip(geometry.shape, geometry.spacing)])
    return np.sqrt(xi2), values, dxi


def fourier_dc(spec, geometry):
    """``(|w_hat(0)|, max |w_hat|)`` with the exterior of the grid included in the DC value."""
    _, values, _ = _spectrum(build_w(spec), geometry)
    dc = wavelet_transform_at(spec, geometry, [0.0])[0]
    return abs(dc), float(np.max(np.abs(values)))


def fourier_check_c(spec, geometry):
    """Extrapolate ``|xi|^(-alpha) w_hat(xi)`` to ``xi = 0``; approximates ``c_(alpha,m)``.

    Uses the three smallest nonzero frequencies of ``geometry`` along the
    first axis and the quadratic through them.
    """
    fundamental = 2.0 * math.pi / (geometry.shape[0] * geometry.spacing[0])
    rho = fundamental * np.arange(1, 4)
    vals = wavelet_transform_at(spec, geometry, rho) * rho ** (-spec.alpha)
    if abs(vals[0] - vals[1]) > 0.05 * abs(vals[1]):
        warnings.warn(
            f"lowest-frequency estimates differ by {abs(vals[0] / vals[1] - 1):.1%}; "
            "widen the grid",
            ResolutionWarning,
            stacklevel=2,
        )
    return float(np.polyval(np.polyfit(rho, vals, 2), 0.0))


def fourier_check_d(spec, geometry, variant="printed"):
    """Discrete ``sigma_(n-1)^-1 int w_hat(y) |y|^p dy``; approximates ``d_(alpha,m)``.

    ``variant="printed"`` uses ``p = 2 - n - alpha``; ``variant="sphere"``
    uses ``p = -alpha``. They coincide for ``n = 2``; only the former matches
    the scale-integral constant in other dimensions. The zero-frequency bin
    is omitted.
    """
    if variant == "printed":
        power = 2.0 - spec.n - spec.alpha
    elif variant == "sphere":
        power = -spec.alpha
    else:
        raise ValueError(f"unknown variant {variant!r}")
    rho, values, dxi = _spectrum(build_w(spec), geometry)
    mask = rho > 0
    total = math.fsum((values[mask] * rho[mask] ** power).ravel()) * dxi
    return total / constants.sigma(spec.n - 1)

"""Closed-form radial kernels ``p(r) (1 + r)^gamma`` with ``r = |x|^2``.

The reconstructing kernel of order ``alpha`` and smoothness ``m`` is

    w(x) = (-Laplacian)^m [(1 + |x|^2)^(m - (n + alpha)/2)],

and its companions are ``h = I^alpha w``, ``w_tilde = -Laplacian w``,
``h_tilde = I^alpha w_tilde`` and the scale-integrated kernel ``psi``.
For radial functions the Laplacian acts on the profile through

    L f = 2n f' + 4 r f'',

which maps ``p(r) (1+r)^gamma`` to ``q(r) (1+r)^(gamma-2)`` with
``deg q <= deg p + 1``. Coefficients are kept as exact fractions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from . import constants
from .errors import DegenerateConstant, DomainError
from .fields import GridGeometry, ScalarField

logger = logging.getLogger(__name__)


def as_fraction(x):
    """Exact fraction for ints/fractions; shortest-repr decimal for floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)))


def _poly_strip(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_add(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] += v
    return out


def _poly_scale(a, s):
    return [v * s for v in a]


def _poly_shift(a):
    """Multiply by r."""
    return [Fraction(0)] + list(a)


def _poly_deriv(a):
    return [i * v for i, v in enumerate(a)][1:]


@dataclass(frozen=True)
class RadialProfile:
    """The radial function ``x -> p(|x|^2) (1 + |x|^2)^gamma_exp``.

    ``coeffs`` are the polynomial coefficients ``c_0, ..., c_d`` of ``p``
    (lowest degree first, trailing zeros stripped).
    """

    coeffs: tuple
    gamma_exp: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _poly_strip(as_fraction(c) for c in self.coeffs))
        object.__setattr__(self, "gamma_exp", as_fraction(self.gamma_exp))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def decay_exponent(self):
        """``d + gamma``: the profile behaves like ``r^(d+gamma)`` as ``r -> inf``."""
        if self.is_zero:
            return -math.inf
        return self.degree + self.gamma_exp

    def is_integrable(self, n):
        return self.is_zero or 2 * self.decay_exponent < -n

    def float_coeffs(self):
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, r2):
        """Evaluate at ``r = |x|^2``."""
        r2 = np.asarray(r2, dtype=float)
        if self.is_zero:
            return np.zeros_like(r2)
        poly = np.polynomial.polynomial.polyval(r2, self.float_coeffs())
        return poly * (1.0 + r2) ** float(self.gamma_exp)

    def at(self, x):
        """Evaluate at positions ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        return self(np.sum(x * x, axis=-1))

    def scaled(self, factor):
        return RadialProfile(tuple(c * as_fraction(factor) for c in self.coeffs), self.gamma_exp)

    def __neg__(self):
        return self.scaled(-1)

    def apply_L(self, n):
        return apply_L(self, n)


def apply_L(profile, n):
    """Radial Laplacian in ``R^n`` of ``p(r)(1+r)^gamma``.

    With ``u = p'(1+r) + gamma p`` the result is
    ``[2n u (1+r) + 4r (u'(1+r) + (gamma-1) u)] (1+r)^(gamma-2)``.
    """
    g = profile.gamma_exp
    new_gamma = g - 2
    if profile.is_zero:
        return RadialProfile((), new_gamma)
    p = list(profile.coeffs)
    one_plus_r = [Fraction(1), Fraction(1)]
    u = _poly_add(_poly_mul(_poly_deriv(p), one_plus_r), _poly_scale(p, g))
    first = _poly_scale(_poly_mul(u, one_plus_r), 2 * n)
    inner = _poly_add(_poly_mul(_poly_deriv(u), one_plus_r), _poly_scale(u, g - 1))
    second = _poly_scale(_poly_shift(inner), 4)
    return RadialProfile(tuple(_poly_add(first, second)), new_gamma)


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _base_exponent(spec):
    """``(alpha - n)/2 - m``, the exponent of ``h``."""
    return (as_fraction(spec.alpha) - spec.n) / 2 - spec.m


def build_w(spec):
    """Reconstructing kernel ``(-Laplacian)^m [(1+r)^(m-(n+alpha)/2)]``."""
    n, m = spec.n, spec.m
    target = -(spec.n + as_fraction(spec.alpha)) / 2
    prof = RadialProfile((1,), m + target)
    for _ in range(m):
        prof = apply_L(prof, n)
    if m % 2:
        prof = -prof
    if prof.decay_exponent > target:
        raise AssertionError(f"w decays slower than |x|^-(n+alpha) for {spec}")
    if prof.decay_exponent < target:
        logger.info("leading terms of w cancel for %s: decay exponent %s", spec, prof.decay_exponent)
    return prof


def build_w_tilde(spec):
    """``w_tilde = -Laplacian w``."""
    return -apply_L(build_w(spec), spec.n)


def _amplitude(spec):
    a = constants.a_alpha_m(spec)
    if a == 0:
        raise DegenerateConstant(f"a_(alpha,m) vanishes for {spec}")
    return a


def build_h(spec):
    """``h = I^alpha w = a (1+r)^((alpha-n)/2 - m)``."""
    prof = RadialProfile((_amplitude(spec),), _base_exponent(spec))
    assert prof.is_integrable(spec.n)
    return prof


def build_h_tilde(spec):
    """``h_tilde = -a Laplacian[(1+r)^((alpha-n)/2 - m)]``."""
    base = RadialProfile((1,), _base_exponent(spec))
    prof = apply_L(base, spec.n).scaled(-as_fraction(_amplitude(spec)))
    assert prof.is_integrable(spec.n)
    return prof


def build_psi(spec):
    """``psi = a (n + 2m - alpha) (1+r)^((alpha-n)/2 - m - 1)``; mass ``d_(alpha,m)``."""
    amp = _amplitude(spec) * (spec.n + 2 * spec.m - spec.alpha)
    prof = RadialProfile((amp,), _base_exponent(spec) - 1)
    assert prof.is_integrable(spec.n)
    return prof


KERNEL_BUILDERS = {
    "w": build_w,
    "h": build_h,
    "wtilde": build_w_tilde,
    "htilde": build_h_tilde,
    "psi": build_psi,
}


def radial_integral(profile, n):
    """Integral of the profile over ``R^n`` by adaptive quadrature.

    Substituting ``u = 1/(1+|x|^2)`` maps ``[0, inf)`` onto ``(0, 1]``:

        sigma_(n-1)/2 * int_0^1 Q(u) u^A (1-u)^B du,
        Q(u) = sum_j c_j (1-u)^j u^(d-j),  A = -d-gamma-n/2-1,  B = n/2-1,

    and QUADPACK's algebraic-weight rule handles the endpoint powers, so no
    tail truncation is involved.
    """
    if profile.is_zero:
        return 0.0
    if not profile.is_integrable(n):
        raise DomainError(f"profile is not integrable over R^{n}")
    d = profile.degree
    c = profile.float_coeffs()
    exp_a = float(-profile.decay_exponent) - n / 2.0 - 1.0
    exp_b = n / 2.0 - 1.0

    def q(u):
        return sum(c[j] * (1.0 - u) ** j * u ** (d - j) for j in range(d + 1))

    # zero-mass kernels cancel large terms; scale the absolute target with them
    scale = float(np.max(np.abs(c)))
    val, _ = integrate.quad(
        q, 0.0, 1.0, weight="alg", wvar=(exp_a, exp_b), epsabs=1e-14 * scale, epsrel=1e-12, limit=200
    )
    return 0.5 * constants.sigma(n - 1) * val


def evaluate(profile, points):
    """Evaluate at squared radii (1-D input) or positions (last axis = n)."""
    points = np.asarray(points, dtype=float)
    if points.ndim <= 1:
        return profile(points)
    return profile.at(points)


def scale_integrated_kernel(profile, n, power, lower):
    """Radial function ``x -> int_lower^inf t^(-n) p(|x/t|^2) t^(-1-power) dt``.

    Returned as a callable of ``r = |x|^2``. Substituting ``s = |x|/t`` turns
    the scale integral into incomplete beta functions, one per monomial.
    """
    if lower <= 0:
        raise DomainError("lower scale limit must be positive")
    if profile.is_zero:
        return lambda r2: np.zeros_like(np.asarray(r2, dtype=float))
    g = float(profile.gamma_exp)
    terms = []
    for j, cj in enumerate(profile.float_coeffs()):
        a = j + (n + power) / 2.0
        b = -a - g
        if a <= 0 or b <= 0:
            raise DomainError("scale integral diverges for this profile and power")
        terms.append((cj, a, b, special.beta(a, b)))
    c0 = float(profile.coeffs[0])
    at_zero = c0 * lower ** (-(n + power)) / (n + power)

    def kernel(r2):
        r2 = np.asarray(r2, dtype=float)
        z = r2 / (lower * lower + r2)
        total = np.zeros_like(r2)
        for cj, a, b, bab in terms:
            total = total + cj * bab * special.betainc(a, b, z)
        small = r2 < (1e-8 * lower) ** 2
        safe = np.where(small, 1.0, r2)
        out = 0.5 * total * safe ** (-(n + power) / 2.0)
        return np.where(small, at_zero, out)

    return kernel


def _gauss_cell_nodes(order, h):
    x, wts = np.polynomial.legendre.leggauss(order)
    return 0.5 * h * x, 0.5 * wts


def _cell_average_block(func, axes, spacing, order):
    """Average of a radial ``func(r2)`` over the cells centred on ``axes``."""
    n = len(axes)
    shape = tuple(len(a) for a in axes)
    rules = [_gauss_cell_nodes(order, h) for h in spacing]
    acc = np.zeros(shape)
    for idx in np.ndindex(*(order,) * n):
        r2 = np.zeros(shape)
        weight = 1.0
        for axis, k in enumerate(idx):
            nodes, wts = rules[axis]
            view = [1] * n
            view[axis] = -1
            r2 = r2 + ((axes[axis] + nodes[k]) ** 2).reshape(view)
            weight *= wts[k]
        acc += weight * func(r2)
    return acc


def sample_radial(func, geometry, cell_order=None, width=None):
    """Sample a radial function (callable of ``|x|^2``) on ``geometry``.

    With ``cell_order=None`` values are taken at the nodes. Otherwise each
    value is the Gauss-Legendre average of ``func`` over the node's cell,
    with ``cell_order`` points per axis, refined near the origin when the
    feature ``width`` is below two cells.
    """
    axes = geometry.axes()
    if cell_order is None:
        return func(geometry.radius2())
    values = _cell_average_block(func, axes, geometry.spacing, cell_order)
    hmax = max(geometry.spacing)
    if width is not None and width < 2 * hmax:
        fine = int(min(48, max(cell_order, math.ceil(8 * hmax / width))))
        reach = 3 * hmax + 8 * width
        block = []
        for ax in axes:
            idx = np.nonzero(np.abs(ax) <= reach)[0]
            block.append(slice(idx[0], idx[-1] + 1) if idx.size else slice(0, 0))
        sub_axes = [ax[s] for ax, s in zip(axes, block)]
        if all(a.size for a in sub_axes):
            values[tuple(block)] = _cell_average_block(func, sub_axes, geometry.spacing, fine)
    return values


def sample_scaled(profile, t, geometry, cell_order=None):
    """Field of ``t^(-n) profile(|x/t|^2)`` on ``geometry``.

    Node sampling by default (exact at nodes); pass ``cell_order`` for cell
    averages, which keep the discrete mass of sub-cell kernels right.
    """
    if t <= 0:
        raise DomainError("scale t must be positive")
    n = geometry.n

    def func(r2):
        return t ** (-n) * profile(r2 / (t * t))

    return ScalarField(geometry, sample_radial(func, geometry, cell_order, width=t))


def scaled_kernel_values(profile, t, geometry, cell_order=4):
    """Cell-averaged ``t^(-n) profile(|x/t|^2)`` on ``geometry.offsets()``."""
    return sample_scaled(profile, t, geometry.offsets(), cell_order).data


__all__ = [
    "KERNEL_BUILDERS",
    "RadialProfile",
    "apply_L",
    "as_fraction",
    "build_h",
    "build_h_tilde",
    "build_psi",
    "build_w",
    "build_w_tilde",
    "evaluate",
    "radial_integral",
    "sample_radial",
    "sample_scaled",
    "scale_integrated_kernel",
    "scaled_kernel_values",
]

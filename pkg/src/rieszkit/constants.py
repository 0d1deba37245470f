"""Normalizing constants for Riesz potentials and their reconstructing kernels.

All gamma-function evaluations go through :func:`gamma`, a Lanczos
approximation (g = 7, nine coefficients) with the reflection formula for
arguments below 1/2. Arguments within ``POLE_TOL`` of a nonpositive integer
are treated as poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateConstant, DomainError, PoleError

POLE_TOL = 1e-9

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def is_pole(x, tol=POLE_TOL):
    """True when ``x`` lies within ``tol`` of 0, -1, -2, ..."""
    nearest = round(x)
    return nearest <= 0 and abs(x - nearest) <= tol


def gamma(x):
    """Gamma function of a real argument.

    Raises
    ------
    PoleError
        If ``x`` is (within ``POLE_TOL`` of) a nonpositive integer.
    """
    x = float(x)
    if is_pole(x):
        raise PoleError(f"gamma pole at {x!r}")
    if x < 0.5:
        # reduce before multiplying by pi so sin() stays accurate far from 0
        k = round(x)
        s = math.sin(math.pi * (x - k))
        if k % 2:
            s = -s
        return math.pi / (s * gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    half = t ** ((x + 0.5) / 2.0)
    return _SQRT_2PI * half * math.exp(-t) * half * acc


def _gamma_ratio(num, den):
    """Gamma(num) / Gamma(den), returning 0.0 for a denominator pole."""
    if is_pole(den):
        if is_pole(num):
            raise PoleError(f"gamma poles at {num!r} and {den!r}")
        return 0.0
    return gamma(num) / gamma(den)


def default_m(alpha):
    """Smoothness index ``floor((alpha + 2) / 2)``."""
    return int(math.floor((alpha + 2.0) / 2.0))


@dataclass(frozen=True)
class KernelSpec:
    """Dimension ``n``, Riesz order ``alpha`` and smoothness index ``m``.

    ``m`` defaults to ``floor((alpha + 2) / 2)``. Construction validates
    ``0 < alpha < n``, ``2m > alpha`` and that ``c_{alpha,m}`` is finite and
    nonzero.
    """

    n: int
    alpha: float
    m: int | None = None

    def __post_init__(self):
        n, alpha = self.n, float(self.alpha)
        if int(n) != n or n < 1:
            raise DomainError(f"dimension must be a positive integer, got {n!r}")
        if not (0.0 < alpha < n):
            raise DomainError(f"alpha must lie in (0, n={n}), got {alpha!r}")
        m = default_m(alpha) if self.m is None else self.m
        if int(m) != m or m < 1:
            raise DomainError(f"m must be a positive integer, got {m!r}")
        if not 2 * m > alpha:
            raise DomainError(f"need 2m > alpha, got m={m}, alpha={alpha}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "m", int(m))
        c_alpha_m(self.n, self.alpha, self.m)

    @property
    def a(self):
        return a_alpha_m(self)

    @property
    def c(self):
        return c_alpha_m(self)

    @property
    def d(self):
        return d_alpha_m(self)


def _unpack(spec, alpha, m):
    if isinstance(spec, KernelSpec):
        return spec.n, spec.alpha, spec.m
    if alpha is None or m is None:
        raise TypeError("pass a KernelSpec or all of (n, alpha, m)")
    return int(spec), float(alpha), int(m)


def gamma_n(n, alpha):
    """Riesz normalizing constant ``2^a pi^(n/2) Gamma(a/2) / Gamma((n-a)/2)``.

    Raises
    ------
    PoleError
        ``where="numerator"`` when ``alpha/2`` is a pole (constant infinite)
        and ``where="denominator"`` when ``(n - alpha)/2`` is a pole.
    """
    if is_pole(alpha / 2.0):
        raise PoleError(f"gamma_n({n}, {alpha}): Gamma(alpha/2) has a pole", "numerator")
    if is_pole((n - alpha) / 2.0):
        raise PoleError(
            f"gamma_n({n}, {alpha}): Gamma((n-alpha)/2) has a pole", "denominator"
        )
    return (
        2.0**alpha
        * math.pi ** (n / 2.0)
        * gamma(alpha / 2.0)
        / gamma((n - alpha) / 2.0)
    )


def a_alpha_m(spec, alpha=None, m=None):
    """Amplitude of ``h = I^alpha w``; zero when ``(n+alpha-2m)/2`` is a pole.

    Accepts a :class:`KernelSpec` or the raw triple ``(n, alpha, m)`` (the
    raw form allows parameter choices that a KernelSpec would reject).
    """
    n, alpha, m = _unpack(spec, alpha, m)
    return 2.0 ** (2 * m - alpha) * _gamma_ratio(
        (n + 2 * m - alpha) / 2.0, (n + alpha - 2 * m) / 2.0
    )


def c_alpha_m(spec, alpha=None, m=None):
    """Mass of ``h``, equal to ``gamma_n(n, 2m - alpha)``."""
    n, alpha, m = _unpack(spec, alpha, m)
    try:
        return gamma_n(n, 2 * m - alpha)
    except PoleError as exc:
        state = "zero" if exc.where == "denominator" else "infinite"
        raise DegenerateConstant(
            f"c_(alpha,m) is {state} for n={n}, alpha={alpha}, m={m}"
        ) from exc


def d_alpha_m(spec, alpha=None, m=None):
    n, alpha, m = _unpack(spec, alpha, m)
    return (2 * m - alpha) * c_alpha_m(n, alpha, m)


def sigma(k):
    """Surface area of the unit sphere S^k in R^(k+1)."""
    if k < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {k}")
    return 2.0 * math.pi ** ((k + 1) / 2.0) / gamma((k + 1) / 2.0)


def _check_nk(n, k):
    if not (1 <= k < n):
        raise DomainError(f"need 1 <= k < n, got n={n}, k={k}")


def fuglede_const(n, k):
    """Constant in ``R_k^* R_k f = d_(k,n) I^k f``."""
    _check_nk(n, k)
    return (2.0 * math.pi) ** k * sigma(n - k - 1) / sigma(n - 1)


def lambda_k(n, k):
    """Constant of the single-scale k-plane inversion, with m = floor((k+2)/2).

    Evaluated from its own closed form rather than as a product, so that the
    factorization ``lambda_k = d_(k,n) * c_(k,m)`` can be checked.
    """
    _check_nk(n, k)
    m = default_m(k)
    try:
        num = 4.0**m * math.pi ** ((n + k) / 2.0) * gamma(n / 2.0) * gamma(m - k / 2.0)
        if is_pole((n + k) / 2.0 - m):
            raise DegenerateConstant(f"lambda_k vanishes for n={n}, k={k}")
        return num / (gamma((n - k) / 2.0) * gamma((n + k) / 2.0 - m))
    except PoleError as exc:
        raise DegenerateConstant(f"lambda_k undefined for n={n}, k={k}") from exc


def delta_k(n, k):
    return (2 * default_m(k) - k) * lambda_k(n, k)

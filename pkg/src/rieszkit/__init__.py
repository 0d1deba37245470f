"""Riesz potentials, their inversion by reconstructing kernels, and planar
Radon reconstruction through backprojection."""

from .constants import KernelSpec, a_alpha_m, c_alpha_m, d_alpha_m, delta_k, fuglede_const, gamma, gamma_n, lambda_k
from .errors import (
    BoundaryWarning,
    CoverageError,
    DecayWarning,
    DegenerateConstant,
    DimensionError,
    DomainError,
    FormatError,
    GeometryMismatch,
    ModeError,
    NumericalWarning,
    PoleError,
    QuadratureWarning,
    ResolutionWarning,
    RieszkitError,
)
from .fields import GridGeometry, ScalarField, convolve, metrics, phantom
from .inversion import (
    ReconstructionReport,
    fourier_check_c,
    fourier_check_d,
    invert_approx,
    invert_psi,
    invert_wavelet_quadrature,
)
from .radial_kernels import (
    RadialProfile,
    build_h,
    build_h_tilde,
    build_psi,
    build_w,
    build_w_tilde,
    radial_integral,
    sample_scaled,
)
from .radon import Sinogram, dual_radon_2d, fuglede_check, radon_2d, reconstruct_radon
from .riesz import riesz_quadrature, riesz_spectral

__version__ = "0.1.0"

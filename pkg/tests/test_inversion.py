import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszkit.constants import KernelSpec
from rieszkit.errors import DomainError, GeometryMismatch, ModeError, QuadratureWarning, ResolutionWarning
from rieszkit.fields import GridGeometry, ScalarField, metrics, phantom
from rieszkit.inversion import (
    ReconstructionReport,
    approximate_identity,
    fourier_check_c,
    fourier_check_d,
    fourier_dc,
    invert_approx,
    invert_psi,
    invert_wavelet_quadrature,
    tail_bound,
    wavelet_transform_at,
)
from rieszkit.radial_kernels import build_h, build_w, sample_scaled
from rieszkit.radon import padded_geometry
from rieszkit.riesz import riesz_quadrature

pytestmark = pytest.mark.filterwarnings("ignore::rieszkit.errors.BoundaryWarning")

SPEC = KernelSpec(2, 1.0, 1)
TS = [1.0, 0.5, 0.25, 0.125]


@pytest.fixture(scope="module")
def pair128():
    geom = GridGeometry.centered(2, 128, 8.0)
    return geom, sample_scaled(build_w(SPEC), 1.0, geom), sample_scaled(build_h(SPEC), 1.0, geom)


def exact_single_scale(geom, t):
    # (h * t^-1 w_t)/c has transform 2 pi |xi| e^{-(1+t)|xi|}, i.e. s^-3 w(x/s), s = 1+t
    s = 1.0 + t
    return ScalarField(geom, s**-3 * build_w(SPEC)(geom.radius2() / s**2))


def test_single_scale_matches_closed_form(pair128):
    geom, w, h = pair128
    outs, _ = invert_approx(h, SPEC, TS)
    for t, out in zip(TS, outs):
        assert np.max(np.abs(out.data - exact_single_scale(geom, t).data)) < 1e-2


def test_single_scale_error_decreases(pair128):
    _, w, h = pair128
    _, report = invert_approx(h, SPEC, TS, reference=w)
    sup = [m.sup_err for m in report.errors_per_scale]
    assert all(b < a for a, b in zip(sup, sup[1:]))


def test_single_scale_error_is_set_by_the_continuum(pair128):
    # the sup error at t = 1/8 is that of the exact limit object, about 0.3 |w|_inf,
    # far above any discretization effect
    geom, w, h = pair128
    outs, report = invert_approx(h, SPEC, TS, reference=w)
    exact = np.max(np.abs(exact_single_scale(geom, 0.125).data - w.data))
    assert report.errors_per_scale[-1].sup_err == pytest.approx(exact, abs=1e-2)
    assert exact > 0.25 * np.max(np.abs(w.data))


def test_zero_input():
    geom = GridGeometry.centered(2, 32, 8.0)
    z = ScalarField.zeros(geom)
    outs, _ = invert_approx(z, SPEC, [1.0, 0.5])
    assert all(not o.data.any() for o in outs)
    out, _ = invert_wavelet_quadrature(z, SPEC, 0.2, n_nodes=10)
    assert not out.data.any()


def test_fubini_cross_path():
    # inverting I^1 f at scale t equals smoothing f by h_t / c
    geom = GridGeometry.centered(2, 128, 8.0)
    big, crop = padded_geometry(geom, 5)
    g = riesz_quadrature(phantom("gaussian", big), 1.0)
    f = phantom("gaussian", geom)
    outs, _ = invert_approx(g, SPEC, [0.5, 0.25])
    for t, out in zip([0.5, 0.25], outs):
        rec = ScalarField(geom, out.data[crop])
        assert metrics(rec, approximate_identity(f, SPEC, t)).l2_rel < 0.01


def test_constant_via_mass():
    # w has no mass, so the constant is checked on a Gaussian; a wrong c shows as a fixed ratio
    geom = GridGeometry.centered(2, 128, 8.0)
    big, crop = padded_geometry(geom, 3)
    g = riesz_quadrature(phantom("gaussian", big), 1.0)
    outs, _ = invert_approx(g, SPEC, [0.5, 0.25, 0.125])
    mass = math.pi
    for out in outs:
        assert 0.97 <= ScalarField(geom, out.data[crop]).mass() / mass <= 1.03


@settings(max_examples=10, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(a, b):
    geom = GridGeometry.centered(2, 32, 8.0)
    g1 = sample_scaled(build_h(SPEC), 1.0, geom)
    g2 = phantom("gaussian", geom)
    for run in (
        lambda g: invert_approx(g, SPEC, [0.5])[0][0].data,
        lambda g: invert_wavelet_quadrature(g, SPEC, 0.5, n_nodes=8)[0].data,
    ):
        lhs = run(g1 * a + g2 * b)
        rhs = a * run(g1) + b * run(g2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-11 * (1 + np.abs(rhs).max()))


def test_scale_validation(pair128):
    _, _, h = pair128
    with pytest.raises(DomainError):
        invert_approx(h, SPEC, [0.5, 1.0])
    with pytest.raises(DomainError):
        invert_approx(h, SPEC, [5.0])
    with pytest.raises(DomainError):
        invert_approx(h, SPEC, [0.0])
    with pytest.raises(GeometryMismatch):
        invert_approx(h, KernelSpec(3, 1.0), [1.0])


def test_report_rows(pair128):
    _, w, h = pair128
    _, report = invert_approx(h, SPEC, [1.0, 0.5], reference=w)
    rows = report.rows()
    assert [r["scale"] for r in rows] == [1.0, 0.5]
    assert rows[0]["constant"] == pytest.approx(2 * math.pi)
    assert {"sup_err", "l2_rel", "l1_rel"} <= set(rows[0])
    with pytest.raises(DomainError):
        ReconstructionReport(SPEC, [0.5, 0.5], "approx", 1.0)


@pytest.mark.slow
def test_wavelet_matches_psi_oracle_inside_the_box():
    geom = GridGeometry.centered(2, 256, 8.0)
    w = sample_scaled(build_w(SPEC), 1.0, geom)
    h = sample_scaled(build_h(SPEC), 1.0, geom)
    rec, report = invert_wavelet_quadrature(h, SPEC, 0.05, T=4.0, reference=w)
    oracle = invert_psi(h, SPEC, 0.05, f_reference=w)
    assert metrics(rec, oracle, geom.central(0.5)).l2_rel < 0.01
    assert report.errors_per_scale[0].l2_rel < 0.05
    assert report.diagnostics["tail"] == "kernel"


def test_tail_completion_matters():
    geom = GridGeometry.centered(2, 64, 8.0)
    w = sample_scaled(build_w(SPEC), 1.0, geom)
    h = sample_scaled(build_h(SPEC), 1.0, geom)
    with_tail, _ = invert_wavelet_quadrature(h, SPEC, 0.25, T=4.0, n_nodes=40)
    with pytest.warns(QuadratureWarning):
        without, _ = invert_wavelet_quadrature(h, SPEC, 0.25, T=4.0, n_nodes=40, tail="none")
    oracle = invert_psi(h, SPEC, 0.25, f_reference=w)
    assert metrics(with_tail, oracle).l2_rel < 0.5 * metrics(without, oracle).l2_rel


def test_tail_bound_scaling():
    geom = GridGeometry.centered(2, 32, 8.0)
    h = sample_scaled(build_h(SPEC), 1.0, geom)
    # bound ~ T^-(n/2 + alpha) = T^-2
    assert tail_bound(h, SPEC, 2.0) / tail_bound(h, SPEC, 4.0) == pytest.approx(4.0)


def test_wavelet_validation():
    geom = GridGeometry.centered(2, 32, 8.0)
    h = sample_scaled(build_h(SPEC), 1.0, geom)
    with pytest.raises(DomainError):
        invert_wavelet_quadrature(h, SPEC, 2.0, T=1.0)
    with pytest.raises(DomainError):
        invert_wavelet_quadrature(h, SPEC, 0.1, n_nodes=1)
    with pytest.raises(ValueError):
        invert_wavelet_quadrature(h, SPEC, 0.1, tail="guess")


def test_psi_needs_a_reference():
    geom = GridGeometry.centered(2, 32, 8.0)
    with pytest.raises(ModeError):
        invert_psi(ScalarField.zeros(geom), SPEC, 0.1)
    with pytest.raises(DomainError):
        invert_psi(None, SPEC, 0.0, f_reference=ScalarField.zeros(geom))


def test_psi_oracle_is_an_approximate_identity():
    geom = GridGeometry.centered(2, 128, 8.0)
    f = phantom("gaussian", geom)
    errs = [metrics(invert_psi(None, SPEC, e, f_reference=f), f).l2_rel for e in (1.0, 0.5, 0.25)]
    assert errs[0] > errs[1] > errs[2]
    w = sample_scaled(build_w(SPEC), 1.0, geom)
    sups = [metrics(invert_psi(None, SPEC, e, f_reference=w), w).sup_err for e in (0.4, 0.2, 0.1)]
    assert sups[0] > sups[1] > sups[2]


def test_psi_oracle_preserves_mass_at_large_eps():
    geom = GridGeometry.centered(2, 128, 8.0)
    f = phantom("gaussian", geom)
    smooth = invert_psi(None, SPEC, 8.0, f_reference=f)
    assert smooth.data.max() < 0.05 * f.data.max()
    # unit-mass psi_8 / d keeps this share on [-8, 8]^2 when centred on a point
    # (quadrature of 3/(2 pi) (1+|x|^2)^(-5/2) over [-1, 1]^2)
    inside = 0.7008859302811947
    assert smooth.mass() / f.mass() == pytest.approx(inside, rel=0.01)
    full = invert_psi(None, SPEC, 8.0, f_reference=phantom("gaussian", GridGeometry.centered(2, 128, 64.0)))
    assert full.mass() / math.pi == pytest.approx(1.0, abs=0.01)


def test_fourier_constant_and_dc():
    geom = GridGeometry.centered(2, 256, 32.0)
    with pytest.warns(ResolutionWarning):
        c = fourier_check_c(SPEC, geom)
    assert c == pytest.approx(2 * math.pi, rel=0.05)
    dc, peak = fourier_dc(SPEC, geom)
    assert dc < 1e-3 * peak
    assert peak == pytest.approx(2 * math.pi / math.e, rel=1e-3)


def test_fourier_transform_values():
    geom = GridGeometry.centered(2, 256, 32.0)
    rho = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(
        wavelet_transform_at(SPEC, geom, rho), 2 * math.pi * rho * np.exp(-rho), rtol=1e-4
    )


def test_fourier_d_variants():
    geom = GridGeometry.centered(2, 256, 32.0)
    d2 = fourier_check_d(SPEC, geom)
    assert d2 == pytest.approx(2 * math.pi, rel=0.1)
    assert fourier_check_d(SPEC, geom, "sphere") == pytest.approx(d2, rel=1e-12)
    # only the |y|^(2-n-alpha) weight reproduces d in three dimensions
    spec3 = KernelSpec(3, 1.0)
    g3 = GridGeometry.centered(3, 64, 16.0)
    assert fourier_check_d(spec3, g3) == pytest.approx(spec3.d, rel=0.02)
    assert fourier_check_d(spec3, g3, "sphere") > 1.5 * spec3.d
    with pytest.raises(ValueError):
        fourier_check_d(SPEC, geom, "other")

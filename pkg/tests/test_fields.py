import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszkit.constants import KernelSpec
from rieszkit.errors import BoundaryWarning, DomainError, GeometryMismatch
from rieszkit.fields import (
    GridGeometry,
    OffsetConvolver,
    ScalarField,
    check_boundary_decay,
    convolve,
    convolve_offsets,
    fft_workers,
    metrics,
    phantom,
)


def test_centered_even_and_odd():
    even = GridGeometry.centered(2, 8, 4.0)
    assert even.spacing == (1.0, 1.0)
    assert even.origin == (-4.0, -4.0)
    assert even.zero_index() == (4, 4)
    odd = GridGeometry.centered(1, 5, 1.0)
    np.testing.assert_allclose(odd.axes()[0], [-1, -0.5, 0, 0.5, 1])


def test_geometry_validation():
    with pytest.raises(GeometryMismatch):
        GridGeometry((4,), (0.0, 0.0), (1.0,))
    with pytest.raises(GeometryMismatch):
        GridGeometry((1,), (0.0,), (1.0,))
    with pytest.raises(GeometryMismatch):
        GridGeometry((4,), (0.0,), (0.0,))


def test_zero_index_requires_node_at_origin():
    with pytest.raises(GeometryMismatch):
        GridGeometry((4,), (0.5,), (1.0,)).zero_index()


def test_offsets_and_circumradius():
    g = GridGeometry.centered(2, 8, 4.0)
    off = g.offsets()
    assert off.shape == (15, 15)
    assert off.origin == (-7.0, -7.0)
    assert off.zero_index() == (7, 7)
    assert g.circumradius() == pytest.approx(4 * math.sqrt(2))


def test_central_slices():
    g = GridGeometry.centered(2, 8, 4.0)
    assert g.central(0.5) == (slice(2, 6), slice(2, 6))


def test_field_is_read_only_and_finite():
    g = GridGeometry.centered(1, 4, 1.0)
    f = ScalarField(g, np.ones(4))
    with pytest.raises(ValueError):
        f.data[0] = 2.0
    with pytest.raises(ValueError):
        ScalarField(g, np.array([1.0, np.nan, 0.0, 0.0]))
    with pytest.raises(GeometryMismatch):
        ScalarField(g, np.ones(5))


def test_field_arithmetic_and_mass():
    g = GridGeometry.centered(2, 4, 1.0)
    f = ScalarField(g, np.ones((4, 4)))
    assert f.mass() == pytest.approx(4.0)
    assert (f + f).mass() == pytest.approx(8.0)
    assert (f - f).mass() == 0.0
    assert (f * 3).mass() == pytest.approx(12.0)
    assert (f / 2).mass() == pytest.approx(2.0)
    other = ScalarField(GridGeometry.centered(2, 4, 2.0), np.ones((4, 4)))
    with pytest.raises(GeometryMismatch):
        f + other


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 9), st.integers(3, 9), st.integers(0, 2**31 - 1))
def test_fft_and_direct_convolutions_agree(nx, ny, seed):
    rng = np.random.default_rng(seed)
    g = GridGeometry((nx, ny), (-0.3, 1.1), (0.5, 0.25))
    data = rng.standard_normal((nx, ny))
    kernel = rng.standard_normal(g.offsets().shape)
    a = convolve_offsets(data, kernel, g, "fft")
    b = convolve_offsets(data, kernel, g, "direct")
    np.testing.assert_allclose(a, b, atol=1e-10 * np.abs(b).max())


def test_offset_convolution_matches_explicit_sum():
    rng = np.random.default_rng(3)
    g = GridGeometry((5,), (-1.0,), (0.5,))
    data = rng.standard_normal(5)
    kernel = rng.standard_normal(9)
    out = convolve_offsets(data, kernel, g, "direct")
    # kernel index k holds offset (k - 4) h
    expect = [sum(data[j] * kernel[i - j + 4] for j in range(5)) * 0.5 for i in range(5)]
    np.testing.assert_allclose(out, expect, rtol=1e-13)


def test_convolver_reuses_transform():
    rng = np.random.default_rng(1)
    g = GridGeometry.centered(2, 6, 1.5)
    data = rng.standard_normal(g.shape)
    conv = OffsetConvolver(data, g)
    for _ in range(2):
        k = rng.standard_normal(g.offsets().shape)
        np.testing.assert_allclose(conv.apply(k), convolve_offsets(data, k, g, "direct"), atol=1e-12)
    with pytest.raises(GeometryMismatch):
        conv.apply(np.zeros((3, 3)))


def test_convolve_fields_is_commutative_for_centred_data():
    g = GridGeometry.centered(2, 32, 6.0)
    a = phantom("gaussian", g, sigma=0.7)
    b = phantom("gaussian", g, sigma=1.1)
    ab, ba = convolve(a, b), convolve(b, a)
    np.testing.assert_allclose(ab.data, ba.data, atol=1e-12)
    # Gaussians convolve to a Gaussian with summed variances
    s2 = 0.7**2 + 1.1**2
    exact = math.pi * 0.7**2 * 1.1**2 / s2 * np.exp(-g.radius2() / s2)
    np.testing.assert_allclose(ab.data, exact, atol=1e-8)
    np.testing.assert_allclose(convolve(a, b, "direct").data, ab.data, atol=1e-12)


def test_boundary_warning():
    g = GridGeometry.centered(2, 16, 1.0)
    with pytest.warns(BoundaryWarning):
        check_boundary_decay(phantom("gaussian", g))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ratio = check_boundary_decay(phantom("gaussian", GridGeometry.centered(2, 16, 8.0)))
    assert ratio < 1e-6
    assert check_boundary_decay(ScalarField.zeros(g)) == 0.0


def test_phantoms():
    g = GridGeometry.centered(2, 64, 4.0)
    assert phantom("gaussian", GridGeometry.centered(2, 64, 8.0)).mass() == pytest.approx(math.pi, rel=1e-10)
    # node sampling of an indicator: error within one band of cells around the edge
    assert phantom("disk", g, rho=1.0).mass() == pytest.approx(math.pi, abs=2 * math.pi * g.spacing[0])
    # a tanh edge of width w adds (pi w)^2 / 12 to rho^2
    w = 2 * g.spacing[0]
    expect = math.pi * (1.0 + (math.pi * w) ** 2 / 12)
    assert phantom("smooth_disk", g, rho=1.0).mass() == pytest.approx(expect, rel=1e-3)
    shifted = phantom("gaussian", g, center=(1.0, 0.0))
    assert np.unravel_index(np.argmax(shifted.data), g.shape) == (40, 32)
    w = phantom("kernel_w", g, spec=KernelSpec(2, 1.0))
    assert w.data[32, 32] == pytest.approx(2.0)
    with pytest.raises(DomainError):
        phantom("kernel_h", g)
    with pytest.raises(DomainError):
        phantom("triangle", g)


def test_metrics_relative_and_absolute():
    g = GridGeometry.centered(1, 4, 1.0)
    ref = ScalarField(g, np.array([0.0, 1.0, 2.0, 0.0]))
    est = ScalarField(g, np.array([0.0, 1.0, 2.2, 0.0]))
    m = metrics(est, ref)
    assert m.relative
    assert m.sup_err == pytest.approx(0.2)
    assert m.l2_rel == pytest.approx(0.2 / math.sqrt(5))
    assert m.l1_rel == pytest.approx(0.2 / 3)
    zero = ScalarField.zeros(g)
    m0 = metrics(est, zero)
    assert not m0.relative
    assert m0.l2_rel == pytest.approx(math.sqrt(1 + 2.2**2) * math.sqrt(0.5))
    assert metrics(est, ref, (slice(0, 2),)).sup_err == 0.0


def test_fft_workers_env(monkeypatch):
    monkeypatch.setenv("RIESZKIT_THREADS", "0")
    assert fft_workers() == -1
    monkeypatch.setenv("RIESZKIT_THREADS", "3")
    assert fft_workers() == 3
    monkeypatch.delenv("RIESZKIT_THREADS")
    assert fft_workers() == -1

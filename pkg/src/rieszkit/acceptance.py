"""Acceptance table: each check runs at fixed grids and fixed tolerances.

Every ``criterion_*`` function returns a :class:`CriterionResult`. Results
carry measured values only; wall-clock times are kept apart in
``elapsed`` so that files written from them stay reproducible.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import constants, io
from .constants import KernelSpec
from .fields import GridGeometry, ScalarField, metrics, phantom
from .inversion import (
    approximate_identity,
    fourier_check_c,
    fourier_dc,
    invert_approx,
    invert_psi,
    invert_wavelet_quadrature,
)
from .radial_kernels import build_h, build_psi, build_w, build_w_tilde, radial_integral, sample_scaled
from .radon import Sinogram, fuglede_check, radon_2d, reconstruct_radon
from .riesz import riesz_quadrature

REFERENCE = KernelSpec(2, 1.0, 1)
INTEGRAL_SPECS = ((2, 1, 1), (3, 1, 1), (3, 2, 2), (4, 1, 1), (2, 0.5, 1), (3, 1.5, 1))


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    tolerance: str
    values: dict = field(default_factory=dict)
    elapsed: float = 0.0
    artifacts: dict = field(default_factory=dict)

    def line(self):
        shown = ", ".join(f"{k}={_short(v)}" for k, v in self.values.items())
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title}: {shown} ({self.tolerance})"

    def row(self):
        out = {"criterion": self.number, "title": self.title, "passed": self.passed}
        out.update({k: v for k, v in self.values.items() if not isinstance(v, (list, tuple))})
        for k, v in self.values.items():
            if isinstance(v, (list, tuple)):
                out.update({f"{k}[{i}]": x for i, x in enumerate(v)})
        return out


def _short(v):
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _rel(a, b):
    return abs(a - b) / abs(b)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _pair(points, half_width, spec=REFERENCE):
    geom = GridGeometry.centered(spec.n, points, half_width)
    return geom, sample_scaled(build_w(spec), 1.0, geom), sample_scaled(build_h(spec), 1.0, geom)


@_timed
def criterion_1():
    """Quadrature Riesz potential of w against the closed-form h."""
    errs = []
    fields = {}
    for points in (128, 256):
        _, w, h = _pair(points, 8.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = riesz_quadrature(w, 1.0)
        errs.append(metrics(out, h).l2_rel)
        fields[points] = out
    ok = errs[0] <= 0.02 and errs[1] < errs[0]
    return CriterionResult(
        1, "kernel pair I^1 w = h", ok, "L2 <= 2% on 128^2 over +-8, 256^2 strictly smaller",
        {"l2_128": errs[0], "l2_256": errs[1]}, artifacts={"kernel_pair_128": fields[128]},
    )


@_timed
def criterion_2():
    """Closed-form constants."""
    two_pi = 2.0 * math.pi
    checks = {
        "c": _rel(REFERENCE.c, two_pi),
        "gamma_2(1)": _rel(constants.gamma_n(2, 1.0), two_pi),
        "d": _rel(REFERENCE.d, two_pi),
        "a": _rel(REFERENCE.a, 1.0),
        "lambda_1": _rel(constants.lambda_k(2, 1), 4 * math.pi),
        "delta_1": _rel(constants.delta_k(2, 1), 4 * math.pi),
        "d_12": _rel(constants.fuglede_const(2, 1), 2.0),
    }
    worst = 0.0
    for n in range(2, 7):
        for k in range(1, n):
            m = constants.default_m(k)
            prod = constants.fuglede_const(n, k) * constants.c_alpha_m(n, k, m)
            worst = max(worst, _rel(constants.lambda_k(n, k), prod))
    checks["factorization"] = worst
    ok = all(v <= 1e-12 for v in checks.values())
    return CriterionResult(2, "constant identities", ok, "relative <= 1e-12",
                           {"max_rel": max(checks.values()), **checks})


@_timed
def criterion_3():
    """Radial integrals of the kernels against their symbols."""
    worst_mass = 0.0
    worst_zero = 0.0
    for n, alpha, m in INTEGRAL_SPECS:
        spec = KernelSpec(n, float(alpha), m)
        worst_mass = max(
            worst_mass,
            _rel(radial_integral(build_h(spec), n), spec.c),
            _rel(radial_integral(build_psi(spec), n), spec.d),
        )
        worst_zero = max(
            worst_zero,
            abs(radial_integral(build_w(spec), n)),
            abs(radial_integral(build_w_tilde(spec), n)),
        )
    ok = worst_mass <= 1e-8 and worst_zero <= 1e-6
    return CriterionResult(3, "kernel integrals", ok, "int h, int psi to 1e-8 rel; int w, int w~ within 1e-6",
                           {"mass_rel": worst_mass, "zero_abs": worst_zero})


@_timed
def criterion_4():
    """Single-scale inversion of the analytic h."""
    _, w, h = _pair(128, 8.0)
    ts = [1.0, 0.5, 0.25, 0.125]
    outs, report = invert_approx(h, REFERENCE, ts, reference=w)
    sup = [e.sup_err for e in report.errors_per_scale]
    limit = 2e-2 * float(np.max(np.abs(w.data)))
    decreasing = all(b < a for a, b in zip(sup, sup[1:]))
    return CriterionResult(
        4, "approximate inversion of h", decreasing and sup[-1] <= limit,
        "sup error strictly decreasing, final <= 2e-2 |w|_inf",
        {"sup_err": sup, "limit": limit, "decreasing": decreasing},
        artifacts={"approx_inverse": outs[-1]},
    )


@_timed
def criterion_5():
    """Scale-integral inversion of h and agreement with the psi oracle."""
    _, w, h = _pair(512, 16.0)
    rec, _ = invert_wavelet_quadrature(h, REFERENCE, 0.05, T=4.0, n_nodes=80)
    oracle = invert_psi(h, REFERENCE, 0.05, f_reference=w)
    vs_w = metrics(rec, w).l2_rel
    vs_psi = metrics(rec, oracle).l2_rel
    return CriterionResult(
        5, "wavelet inversion of h", vs_w <= 0.05 and vs_psi <= 0.01,
        "L2 <= 5% vs w, <= 1% vs psi oracle (512^2 over +-16, eps=0.05, T=4)",
        {"l2_vs_w": vs_w, "l2_vs_psi": vs_psi},
    )


@_timed
def criterion_6():
    """Low-frequency behaviour of the Fourier transform of w."""
    geom = GridGeometry.centered(2, 256, 32.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        c = fourier_check_c(REFERENCE, geom)
    dc, peak = fourier_dc(REFERENCE, geom)
    c_rel = _rel(c, 2 * math.pi)
    ratio = dc / peak
    return CriterionResult(6, "Fourier constant c", c_rel <= 0.05 and ratio <= 1e-3,
                           "c within 5% of 2 pi; |w^(0)| <= 1e-3 max|w^|",
                           {"c": c, "c_rel": c_rel, "dc_ratio": ratio})


def _gaussian_sinogram():
    geom = GridGeometry.centered(2, 256, 8.0)
    f = phantom("gaussian", geom)
    return geom, f, radon_2d(f, n_angles=360)


@_timed
def criterion_7():
    """Backprojected line integrals against twice the Riesz potential."""
    geom = GridGeometry.centered(2, 256, 8.0)
    f = phantom("gaussian", geom)
    rep = fuglede_check(f, n_angles=360)
    return CriterionResult(7, "Fuglede identity", rep.discrepancy <= 0.05,
                           "L2 <= 5% on central half (256^2, 360 angles)",
                           {"discrepancy": rep.discrepancy, "median_ratio": rep.median_ratio},
                           artifacts={"backprojection": rep.backprojected})


@_timed
def criterion_8():
    """Reconstruction of a Gaussian from its sinogram."""
    geom, f, sino = _gaussian_sinogram()
    approx, rep_a = reconstruct_radon(sino, geom, formula="approx", t_list=[1.0, 0.5, 0.25], reference=f)
    wave, rep_w = reconstruct_radon(sino, geom, formula="wavelet", eps=0.05, reference=f)
    e_a = rep_a.errors_per_scale[-1].l2_rel
    e_w = rep_w.errors_per_scale[-1].l2_rel
    mass_a = approx.mass() / f.mass()
    mass_w = wave.mass() / f.mass()
    ok = e_a <= 0.05 and e_w <= 0.08 and 0.95 <= mass_a <= 1.05 and 0.95 <= mass_w <= 1.05
    return CriterionResult(
        8, "Radon reconstruction", ok,
        "approx L2 <= 5% at t=0.25, wavelet <= 8%, mass ratios in [0.95, 1.05]",
        {"l2_approx": e_a, "l2_wavelet": e_w, "mass_approx": mass_a, "mass_wavelet": mass_w},
        artifacts={"radon_wavelet": wave},
    )


@_timed
def criterion_9():
    """Smoothing by h_t / c converges as t decreases."""
    geom = GridGeometry.centered(2, 128, 8.0)
    floor = 1e-2
    values = {}
    ok = True
    for kind in ("gaussian", "smooth_disk"):
        f = phantom(kind, geom)
        errs = [metrics(approximate_identity(f, REFERENCE, t), f).l2_rel for t in (1.0, 0.5, 0.25, 0.125)]
        values[kind] = errs
        ok = ok and all(b < a or b <= floor for a, b in zip(errs, errs[1:]))
    return CriterionResult(9, "approximate identity", ok,
                           "L2 error decreasing over t = 1..1/8 until 1e-2", values)


def _write_quick(directory):
    """Deterministic reduced selftest: kernel pair and Fuglede check on 64^2."""
    geom = GridGeometry.centered(2, 64, 8.0)
    w = sample_scaled(build_w(REFERENCE), 1.0, geom)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pot = riesz_quadrature(w, 1.0)
    f = phantom("gaussian", geom)
    rep = fuglede_check(f, n_angles=90)
    sino = radon_2d(f, n_angles=90)
    io.write_rgf(os.path.join(directory, "kernel_pair.rgf"), pot)
    io.write_rsg(os.path.join(directory, "sinogram.rsg"), sino)
    io.write_csv(os.path.join(directory, "fuglede.csv"), [rep.as_dict()])


def _files_equal(a, b):
    names = sorted(os.listdir(a))
    if names != sorted(os.listdir(b)):
        return False
    for name in names:
        with open(os.path.join(a, name), "rb") as fa, open(os.path.join(b, name), "rb") as fb:
            if fa.read() != fb.read():
                return False
    return True


@_timed
def criterion_10():
    """Repeatable outputs and exact file round trips."""
    with tempfile.TemporaryDirectory() as tmp:
        first, second = os.path.join(tmp, "a"), os.path.join(tmp, "b")
        os.mkdir(first)
        os.mkdir(second)
        _write_quick(first)
        _write_quick(second)
        same = _files_equal(first, second)
        rng = np.random.default_rng(0)
        geom = GridGeometry((3, 5, 4), (-1.5, 0.25, 2.0), (0.5, 0.125, 1.0 / 3.0))
        fld = ScalarField(geom, rng.standard_normal(geom.shape))
        sino = Sinogram(math.sqrt(2.0), rng.standard_normal((7, 11)))
        p1, p2 = os.path.join(tmp, "f.rgf"), os.path.join(tmp, "p.rsg")
        io.write_rgf(p1, fld)
        io.write_rsg(p2, sino)
        back_f, back_s = io.read_rgf(p1), io.read_rsg(p2)
        rgf_ok = (
            back_f.geometry == geom
            and back_f.data.tobytes() == fld.data.tobytes()
            and io.encode_rgf(back_f) == io.encode_rgf(fld)
        )
        rsg_ok = back_s.s_max == sino.s_max and back_s.data.tobytes() == sino.data.tobytes()
    return CriterionResult(10, "determinism and round trips", same and rgf_ok and rsg_ok,
                           "bit-identical repeated outputs and file round trips",
                           {"repeat_identical": same, "rgf_exact": rgf_ok, "rsg_exact": rsg_ok})


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}

QUICK = (2, 3, 6, 9, 10)


def run(numbers=None):
    numbers = sorted(CRITERIA) if numbers is None else list(numbers)
    return [CRITERIA[k]() for k in numbers]


def write_results(directory, results):
    """CSV table plus any field artifacts; contents exclude timings."""
    os.makedirs(directory, exist_ok=True)
    io.write_csv(os.path.join(directory, "acceptance.csv"), [r.row() for r in results])
    for r in results:
        for name, art in r.artifacts.items():
            io.write_rgf(os.path.join(directory, f"{name}.rgf"), art)

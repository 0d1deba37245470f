"""Command-line entry point: ``rieszkit <subcommand> ...``.

Exit codes: 0 success, 1 failed selftest criteria, 2 invalid input or
unreadable/unwritable files, 3 numerical warning under ``--strict``.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import warnings

from . import acceptance, constants, io
from .errors import NumericalWarning, RieszkitError
from .fields import GridGeometry, metrics, phantom
from .inversion import invert_approx, invert_wavelet_quadrature
from .radial_kernels import KERNEL_BUILDERS, radial_integral, sample_scaled
from .radon import dual_radon_2d, fuglede_check, radon_2d, reconstruct_radon
from .riesz import riesz_quadrature, riesz_spectral

log = logging.getLogger("rieszkit")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _spec(args, n):
    return constants.KernelSpec(n, args.alpha, args.m)


def _grid(args, n=None):
    return GridGeometry.centered(n or args.n, args.points, args.extent)


def _grid_text(geom):
    shape = "x".join(str(s) for s in geom.shape)
    return f"{shape} grid, h={geom.spacing[0]:.6g}"


def _with_ref(line, field, ref_path):
    if ref_path is None:
        return line, None
    ref = io.read_rgf(ref_path)
    m = metrics(field, ref)
    return f"{line} l2_rel={m.l2_rel:.6g} sup_err={m.sup_err:.6g}", m


def _add_grid(p, points=128, extent=8.0, with_n=True):
    if with_n:
        p.add_argument("--n", type=int, default=2, help="dimension")
    p.add_argument("--points", type=int, default=points, help="points per axis")
    p.add_argument("--extent", type=float, default=extent, help="grid spans [-extent, extent]")


def _add_spec(p):
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--m", type=int, default=None, help="default floor((alpha+2)/2)")


def cmd_kernel(args):
    geom = _grid(args)
    spec = _spec(args, geom.n)
    profile = KERNEL_BUILDERS[args.which](spec)
    field = sample_scaled(profile, args.t, geom)
    io.write_rgf(args.out, field)
    print(
        f"kernel {args.which} n={spec.n} alpha={spec.alpha:g} m={spec.m} {_grid_text(geom)} "
        f"integral={radial_integral(profile, spec.n):.17g} -> {args.out}"
    )


def cmd_phantom(args):
    geom = _grid(args)
    spec = None
    if args.kind.startswith("kernel_"):
        spec = _spec(args, geom.n)
    field = phantom(args.kind, geom, sigma=args.sigma, rho=args.rho, spec=spec)
    io.write_rgf(args.out, field)
    print(f"phantom {args.kind} {_grid_text(geom)} mass={field.mass():.17g} -> {args.out}")


def cmd_riesz(args):
    f = io.read_rgf(args.input)
    if args.method == "spectral":
        out = riesz_spectral(f, args.alpha, pad=args.pad, dc=args.dc)
    else:
        out = riesz_quadrature(f, args.alpha)
    io.write_rgf(args.out, out)
    line = f"riesz {args.method} alpha={args.alpha:g} {_grid_text(f.geometry)} gamma_n={constants.gamma_n(f.geometry.n, args.alpha):.17g}"
    line, _ = _with_ref(line, out, args.ref)
    print(line)


def cmd_invert(args):
    g = io.read_rgf(args.input)
    spec = _spec(args, g.geometry.n)
    ref = io.read_rgf(args.ref) if args.ref else None
    if args.formula == "approx":
        outs, report = invert_approx(g, spec, args.t_list, reference=ref)
        out = outs[-1]
    else:
        out, report = invert_wavelet_quadrature(
            g, spec, args.eps, T=args.T, n_nodes=args.nodes, tail=args.tail, reference=ref
        )
    io.write_rgf(args.out, out)
    if args.report:
        io.write_csv(args.report, report.rows())
    line = f"invert {args.formula} {_grid_text(g.geometry)} constant={report.constant:.17g}"
    if ref is not None:
        m = report.errors_per_scale[-1]
        line += f" l2_rel={m.l2_rel:.6g} sup_err={m.sup_err:.6g}"
    print(line)


def cmd_radon(args):
    f = io.read_rgf(args.input)
    sino = radon_2d(f, n_angles=args.angles)
    io.write_rsg(args.out, sino)
    print(f"radon {_grid_text(f.geometry)} angles={sino.n_angles} offsets={sino.n_offsets} s_max={sino.s_max:.6g}")


def cmd_backproject(args):
    sino = io.read_rsg(args.input)
    geom = io.read_rgf(args.like).geometry if args.like else _grid(args, 2)
    out = dual_radon_2d(sino, geom)
    io.write_rgf(args.out, out)
    print(f"backproject angles={sino.n_angles} {_grid_text(geom)}")


def cmd_fuglede(args):
    f = io.read_rgf(args.input)
    rep = fuglede_check(f, n_angles=args.angles)
    if args.report:
        io.write_csv(args.report, [rep.as_dict()])
    print(
        f"fuglede {_grid_text(f.geometry)} d_12={rep.constant:.17g} "
        f"discrepancy={rep.discrepancy:.6g} median_ratio={rep.median_ratio:.6g}"
    )


def cmd_reconstruct(args):
    sino = io.read_rsg(args.input)
    ref = io.read_rgf(args.ref) if args.ref else None
    geom = ref.geometry if ref is not None else _grid(args, 2)
    out, report = reconstruct_radon(
        sino, geom, formula=args.formula, t_list=args.t_list, eps=args.eps, T=args.T,
        pad=args.pad, reference=ref,
    )
    io.write_rgf(args.out, out)
    if args.report:
        io.write_csv(args.report, report.rows())
    line = f"reconstruct {args.formula} {_grid_text(geom)} constant={report.constant:.17g}"
    if ref is not None:
        m = report.errors_per_scale[-1]
        line += f" l2_rel={m.l2_rel:.6g} mass_ratio={out.mass() / ref.mass():.6g}"
    print(line)


def cmd_report_constants(args):
    spec = _spec(args, args.n)
    rows = {
        "n": spec.n,
        "alpha": spec.alpha,
        "m": spec.m,
        "gamma_n": constants.gamma_n(spec.n, spec.alpha),
        "a": spec.a,
        "c": spec.c,
        "d": spec.d,
    }
    k = int(spec.alpha)
    if k == spec.alpha and 1 <= k < spec.n:
        rows["fuglede_d"] = constants.fuglede_const(spec.n, k)
        rows["lambda_k"] = constants.lambda_k(spec.n, k)
        rows["delta_k"] = constants.delta_k(spec.n, k)
    for name, value in rows.items():
        shown = io.format_value(value)
        if isinstance(value, float) and abs(value) > 0:
            ratio = value / math.pi
            if abs(ratio - round(ratio)) < 1e-12 and round(ratio) != 0:
                shown += f"  ({round(ratio)}*pi)"
        print(f"{name} = {shown}")
    if args.out:
        io.write_csv(args.out, [rows])


def cmd_selftest(args):
    numbers = args.criteria or (acceptance.QUICK if args.quick else None)
    results = []
    for k in (sorted(acceptance.CRITERIA) if numbers is None else numbers):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NumericalWarning)
            res = acceptance.CRITERIA[k]()
        print(f"{res.line()} [{res.elapsed:.1f}s]", flush=True)
        results.append(res)
    if args.out:
        acceptance.write_results(args.out, results)
    failed = [r.number for r in results if not r.passed]
    print(f"selftest: {len(results) - len(failed)}/{len(results)} passed" + (f"; failed {failed}" if failed else ""))
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="rieszkit", description="Riesz potentials, their inversion and planar Radon reconstruction.")
    parser.add_argument("--strict", action="store_true", help="treat numerical warnings as errors (exit 3)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="sample a reconstructing kernel")
    _add_grid(p)
    _add_spec(p)
    p.add_argument("--which", choices=sorted(KERNEL_BUILDERS), default="w")
    p.add_argument("--t", type=float, default=1.0, help="scale")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("phantom", help="sample a test field")
    _add_grid(p)
    _add_spec(p)
    p.add_argument("--kind", choices=["gaussian", "disk", "smooth_disk", "kernel_w", "kernel_h"], default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("riesz", help="forward Riesz potential")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--method", choices=["quadrature", "spectral"], default="quadrature")
    p.add_argument("--pad", type=int, default=4)
    p.add_argument("--dc", choices=["neighbors", "cell_mean"], default="neighbors")
    p.add_argument("--ref")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_riesz)

    p = sub.add_parser("invert", help="recover f from I^alpha f")
    p.add_argument("--in", dest="input", required=True)
    _add_spec(p)
    p.add_argument("--formula", choices=["approx", "wavelet"], default="approx")
    p.add_argument("--t-list", type=_float_list, default=[1.0, 0.5, 0.25])
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--nodes", type=int, default=80)
    p.add_argument("--tail", choices=["kernel", "none"], default="kernel")
    p.add_argument("--ref")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("radon", help="planar line integrals")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--angles", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_radon)

    p = sub.add_parser("backproject", help="dual Radon transform")
    p.add_argument("--in", dest="input", required=True)
    _add_grid(p, with_n=False)
    p.add_argument("--like", help="take the grid from this RGF1 file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_backproject)

    p = sub.add_parser("fuglede", help="compare R*R f with 2 I^1 f")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--angles", type=int, default=360)
    p.add_argument("--report")
    p.set_defaults(func=cmd_fuglede)

    p = sub.add_parser("reconstruct", help="reconstruct from a sinogram")
    p.add_argument("--in", dest="input", required=True)
    _add_grid(p, with_n=False)
    p.add_argument("--formula", choices=["approx", "wavelet"], default="approx")
    p.add_argument("--t-list", type=_float_list, default=[1.0, 0.5, 0.25])
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--pad", type=int, default=3)
    p.add_argument("--ref", help="reference field; also fixes the output grid")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("report-constants", help="print normalizing constants")
    p.add_argument("--n", type=int, default=2)
    _add_spec(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report_constants)

    p = sub.add_parser("selftest", help="run the acceptance table")
    p.add_argument("--quick", action="store_true", help="only the fast criteria")
    p.add_argument("--criteria", type=lambda s: [int(x) for x in s.split(",")], default=None)
    p.add_argument("--out", help="directory for acceptance.csv and field artifacts")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    with warnings.catch_warnings():
        if args.strict:
            warnings.simplefilter("error", NumericalWarning)
        try:
            code = args.func(args)
        except NumericalWarning as exc:
            print(f"rieszkit: numerical warning ({type(exc).__name__}): {exc}", file=sys.stderr)
            return 3
        except (RieszkitError, ValueError) as exc:
            print(f"rieszkit: error: {exc}", file=sys.stderr)
            return 2
        except OSError as exc:
            where = exc.filename if exc.filename else ""
            print(f"rieszkit: error: {where}: {exc.strerror or exc}", file=sys.stderr)
            return 2
    return code or 0

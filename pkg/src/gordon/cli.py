"""Command-line interface.

Subcommands: families list / families eval, verify, backlund run,
harmonic build / harmonic verify, acceptance.  Reports are JSON, fields are
CSV with a JSON grid sidecar.  Exit codes: 0 all checks passed, 1 a check
failed, 2 invalid configuration.  The GORDON_TOL environment variable
overrides the default verification tolerance of 1e-3.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import acceptance, families
from .backlund import BacklundPair, backlund_residuals, theta_to_w, w_to_theta
from .families import (
    CATALOG,
    eval_family,
    get_family,
    hopf_weight,
    residual_sine_gordon,
    residual_sinh_gordon,
    sign_probe,
)
from .grid import (
    Grid2D,
    dump_complex_csv,
    dump_grid_sidecar,
    dump_scalar_csv,
    field,
    load_complex_csv,
    load_scalar_csv,
)
from .harmonic import (
    correspondence_check,
    gaussian_curvature,
    hopf_residual,
    ppfd_construct,
    pullback_metric,
)
from .report import CheckResult, VerificationReport


class ConfigError(Exception):
    pass


def _grid_from_args(args, fam=None, include_axes=False) -> Grid2D:
    """Grid from --grid (inline JSON or a file path), else the family rectangle.

    include_axes expands the rectangle to contain the x = 0 and y = 0 lines,
    which the quadrature constructions seed from.
    """
    if getattr(args, "grid", None):
        spec = args.grid
        if os.path.exists(spec):
            with open(spec) as fh:
                d = json.load(fh)
        else:
            try:
                d = json.loads(spec)
            except json.JSONDecodeError as e:
                raise ConfigError(f"--grid is neither a file nor valid JSON: {e}")
        try:
            return Grid2D.from_json(d)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad grid spec: {e}")
    if fam is None:
        raise ConfigError("no --grid given and no family to take a rectangle from")
    x0, x1, y0, y1 = fam.rectangle
    if include_axes:
        x0, x1 = min(x0, 0.0), max(x1, 0.0)
        y0, y1 = min(y0, 0.0), max(y1, 0.0)
    h = args.h
    nx = int(round((x1 - x0) / h)) + 1
    ny = int(round((y1 - y0) / h)) + 1
    return Grid2D(x0, x1, y0, y1, max(nx, 5), max(ny, 5))


def _tol(args) -> float:
    if getattr(args, "tol", None) is not None:
        if args.tol <= 0:
            raise ConfigError("tolerance must be positive")
        return args.tol
    return acceptance.base_tolerance()


def _family(fid: str):
    try:
        return get_family(fid)
    except KeyError as e:
        raise ConfigError(str(e))


def _emit(report: VerificationReport, args) -> int:
    for c in sorted(report.checks, key=lambda c: c.name):
        print(c.line())
    if getattr(report, "elapsed", None) is not None:
        print(f"elapsed: {report.elapsed:.1f}s")
    if getattr(args, "json", None):
        report.write(args.json)
        print(f"report written to {args.json}")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# subcommand bodies


def cmd_families_list(args) -> int:
    if args.json:
        rows = [
            {
                "id": f.id,
                "kind": f.kind,
                "formula": f.formula,
                "rectangle": list(f.rectangle),
                "sign": f.sign,
                "params": f.params,
                "convention": f.convention,
            }
            for f in CATALOG.values()
        ]
        print(json.dumps(rows, indent=2))
    else:
        for f in CATALOG.values():
            sign = {1: "sigma=+1", -1: "sigma=-1"}.get(f.sign, "")
            extra = " ".join(s for s in (sign, f.convention or "") if s)
            print(f"{f.id:20s} {f.kind:15s} rect={f.rectangle} {extra}")
            print(f"{'':20s} {f.formula}")
    return 0


def cmd_families_eval(args) -> int:
    fam = _family(args.family)
    g = _grid_from_args(args, fam)
    params = json.loads(args.params) if args.params else None
    out = eval_family(fam.id, g, params)
    if fam.kind == "target_metric":
        for comp, arr in (("E", out.E), ("Fc", out.Fc), ("G", out.G)):
            dump_scalar_csv(field(g, arr, out.mask), f"{args.out}.{comp}.csv")
        dump_grid_sidecar(g, f"{args.out}.grid.json")
        print(f"wrote {args.out}.{{E,Fc,G}}.csv")
    elif fam.kind == "harmonic_map":
        dump_complex_csv(out, args.out)
        dump_grid_sidecar(g, args.out + ".grid.json")
        print(f"wrote {args.out}")
    else:
        dump_scalar_csv(out, args.out)
        dump_grid_sidecar(g, args.out + ".grid.json")
        print(f"wrote {args.out}")
    return 0


def _halved(g: Grid2D) -> Grid2D:
    return Grid2D(g.x0, g.x1, g.y0, g.y1, 2 * g.nx - 1, 2 * g.ny - 1)


def _verify_family(fam, g, tol, convergence) -> list:
    checks = []
    if fam.kind == "sinh_solution":
        sup, n = residual_sinh_gordon(eval_family(fam.id, g)).sup_norm()
        ratio, ok = None, sup < tol
        if convergence:
            sup2, _ = residual_sinh_gordon(eval_family(fam.id, _halved(g))).sup_norm()
            ratio = sup / sup2 if sup2 > 0 else float("inf")
            ok = ok and 3.5 <= ratio <= 4.5
        checks.append(CheckResult(
            f"{fam.id}.sinh_residual", fam.formula, sup, n, tol, ok,
            grid=g.to_json(), ratio=ratio,
        ))
    elif fam.kind == "sine_solution":
        th = eval_family(fam.id, g)
        probed = sign_probe(th)
        sigma = probed if probed != 0 else 1
        sup, n = residual_sine_gordon(th, sigma).sup_norm()
        ok = sup < tol and probed == fam.sign
        ratio = None
        if convergence:
            sup2, _ = residual_sine_gordon(eval_family(fam.id, _halved(g)), sigma).sup_norm()
            ratio = sup / sup2 if sup2 > 0 else float("inf")
            ok = ok and 3.5 <= ratio <= 4.5
        checks.append(CheckResult(
            f"{fam.id}.sine_residual", fam.formula, sup, n, tol, ok,
            flags={"probed_sigma": probed, "recorded_sigma": fam.sign},
            grid=g.to_json(), ratio=ratio,
        ))
    elif fam.kind == "harmonic_map":
        u = eval_family(fam.id, g)
        wgt = hopf_weight(fam.id, g)
        sup, n = hopf_residual(u, wgt).sup_norm()
        checks.append(CheckResult(
            f"{fam.id}.hopf", fam.formula, sup, n, tol, sup < tol, grid=g.to_json(),
        ))
        wpart = eval_family(fam.partner, g, fam.partner_params)
        conv, res = correspondence_check(u, wpart)
        sup, n = res.sup_norm()
        checks.append(CheckResult(
            f"{fam.id}.correspondence", "dzbar_u/dz_u against exp(-+2w)",
            sup, n, tol, sup < tol and conv == fam.convention,
            flags={"convention": conv, "partner": fam.partner}, grid=g.to_json(),
        ))
        gc = acceptance._grid(fam.curvature_rect, (g.x1 - g.x0) / (g.nx - 1))
        uc = eval_family(fam.id, gc)
        K = gaussian_curvature(pullback_metric(uc, hopf_weight(fam.id, gc)))
        sup, n = field(gc, K.values + 1.0, K.mask).sup_norm()
        checks.append(CheckResult(
            f"{fam.id}.pullback_curvature", "pullback metric curvature -1",
            sup, n, tol, sup < tol, grid=gc.to_json(),
        ))
    else:  # target_metric
        K = gaussian_curvature(eval_family(fam.id, g))
        sup, n = field(g, K.values + 1.0, K.mask).sup_norm()
        checks.append(CheckResult(
            f"{fam.id}.curvature", fam.formula, sup, n, tol, sup < tol,
            grid=g.to_json(),
        ))
    return checks


def cmd_verify(args) -> int:
    fam = _family(args.family)
    g = _grid_from_args(args, fam)
    tol = _tol(args)
    checks = _verify_family(fam, g, tol, args.convergence)
    return _emit(VerificationReport(checks, {"family": fam.id, "tolerance": tol}), args)


def cmd_backlund_run(args) -> int:
    fam = _family(args.family)
    g = _grid_from_args(args, fam, include_axes=True)
    analytic = families.scalar_callable(fam.id, fam.params)
    tol = _tol(args)
    if args.direction == "t2w":
        if fam.kind != "sine_solution":
            raise ConfigError("t2w needs a sine-Gordon family")
        th = eval_family(fam.id, g)
        w = theta_to_w(th, args.w00, analytic=analytic)
        out_field, out_name = w, "w"
    else:
        if fam.kind != "sinh_solution":
            raise ConfigError("w2t needs a sinh-Gordon family")
        w = eval_family(fam.id, g)
        th = w_to_theta(w, args.theta00, analytic=analytic)
        out_field, out_name = th, "theta"
    pair = BacklundPair(w, th, provenance=f"{args.direction} march from {fam.id}")
    r1, r2 = backlund_residuals(pair)
    s1, n1 = r1.sup_norm()
    s2, n2 = r2.sup_norm()
    try:
        sigma = sign_probe(th)
    except ValueError:
        sigma = 0
    checks = [
        CheckResult("backlund.r1", "w_x - theta_y + 2 sinh(w) sin(theta)",
                    s1, n1, tol, s1 < tol, grid=g.to_json()),
        CheckResult("backlund.r2", "w_y + theta_x + 2 cosh(w) cos(theta)",
                    s2, n2, tol, s2 < tol, flags={"probed_sigma": sigma},
                    grid=g.to_json()),
    ]
    dump_scalar_csv(out_field, args.out)
    dump_grid_sidecar(g, args.out + ".grid.json")
    print(f"wrote constructed {out_name} to {args.out}")
    return _emit(VerificationReport(checks, {"direction": args.direction, "family": fam.id}), args)


def _resolve_pair(spec: str, args):
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) != 2:
        raise ConfigError("--pair takes 'W_ID,THETA_ID' or 'w.csv,theta.csv'")
    if all(p in CATALOG for p in parts):
        fam_w, fam_t = _family(parts[0]), _family(parts[1])
        if fam_w.kind != "sinh_solution" or fam_t.kind != "sine_solution":
            raise ConfigError("--pair ids must be a sinh family then a sine family")
        g = _grid_from_args(args, fam_w, include_axes=True)
        return BacklundPair(eval_family(fam_w.id, g), eval_family(fam_t.id, g),
                            provenance=f"closed forms ({fam_w.id}, {fam_t.id})")
    for p in parts:
        if not os.path.exists(p):
            raise ConfigError(f"pair member {p!r} is neither a family id nor a file")
    w = load_scalar_csv(parts[0])
    th = load_scalar_csv(parts[1])
    return BacklundPair(w, th, provenance="loaded from CSV")


def cmd_harmonic_build(args) -> int:
    if args.S0 <= 0:
        raise ConfigError("--S0 must be positive")
    pair = _resolve_pair(args.pair, args)
    g = pair.grid
    result = ppfd_construct(pair, args.R0, args.S0)
    tol = _tol(args)
    dump_complex_csv(result.u, args.out + ".u.csv")
    for name, f in (("I1", result.I1), ("I2", result.I2), ("I3", result.I3), ("I4", result.I4)):
        dump_scalar_csv(f, f"{args.out}.{name}.csv")
    dump_grid_sidecar(g, args.out + ".grid.json")
    sup, n = hopf_residual(result.u).sup_norm()
    conv, res = correspondence_check(result.u, pair.w)
    sup_c, n_c = res.sup_norm()
    checks = [
        CheckResult("harmonic.hopf", "half-plane Hopf condition of the constructed map",
                    sup, n, tol, sup < tol, grid=g.to_json()),
        CheckResult("harmonic.correspondence", "dzbar_u/dz_u against exp(-+2w)",
                    sup_c, n_c, tol, sup_c < tol and conv != "none",
                    flags={"convention": conv}, grid=g.to_json()),
    ]
    print(f"wrote {args.out}.u.csv and quadrature fields I1..I4")
    args.json = args.json or (args.out + ".report.json")
    return _emit(VerificationReport(checks, {"R0": args.R0, "S0": args.S0}), args)


def cmd_harmonic_verify(args) -> int:
    u = load_complex_csv(args.u)
    tol = _tol(args)
    checks = []
    sup, n = hopf_residual(u).sup_norm()
    checks.append(CheckResult(
        "harmonic.hopf", "half-plane Hopf condition", sup, n, tol, sup < tol,
        grid=u.grid.to_json(),
    ))
    if args.w:
        w = load_scalar_csv(args.w)
        conv, res = correspondence_check(u, w)
        sup, n = res.sup_norm()
        checks.append(CheckResult(
            "harmonic.correspondence", "dzbar_u/dz_u against exp(-+2w)",
            sup, n, tol, sup < tol and conv != "none",
            flags={"convention": conv}, grid=u.grid.to_json(),
        ))
    if args.metric:
        fam = _family(args.metric)
        if fam.kind != "target_metric":
            raise ConfigError(f"{fam.id} is not a target metric")
        K = gaussian_curvature(eval_family(fam.id, u.grid))
        sup, n = field(u.grid, K.values + 1.0, K.mask).sup_norm()
        checks.append(CheckResult(
            f"{fam.id}.curvature", fam.formula, sup, n, tol, sup < tol,
            grid=u.grid.to_json(),
        ))
    return _emit(VerificationReport(checks, {"u": args.u}), args)


def cmd_acceptance(args) -> int:
    tol = args.tol if args.tol is not None else None
    rep = acceptance.run_acceptance(
        h=args.h, tol=tol, quick=args.quick, convergence=not args.no_convergence
    )
    return _emit(rep, args)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gordon",
        description="Solution families, transformations, and harmonic-map "
        "verification for the elliptic sinh-Gordon / sine-Gordon equations.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_grid_opts(p):
        p.add_argument("--grid", help="grid JSON (inline or a file): {x0,x1,y0,y1,nx,ny}")
        p.add_argument("--h", type=float, default=acceptance.DEFAULT_H,
                       help="grid spacing when --grid is not given (default 1/400)")

    fam = sub.add_parser("families", help="catalog operations")
    fsub = fam.add_subparsers(dest="subcommand", required=True)
    fl = fsub.add_parser("list", help="print the solution catalog")
    fl.add_argument("--json", action="store_true", help="machine-readable output")
    fl.set_defaults(fn=cmd_families_list)
    fe = fsub.add_parser("eval", help="evaluate a family to CSV")
    fe.add_argument("--family", required=True)
    fe.add_argument("--params", help="JSON parameter overrides")
    fe.add_argument("--out", required=True)
    add_grid_opts(fe)
    fe.set_defaults(fn=cmd_families_eval)

    v = sub.add_parser("verify", help="run a family's designated checks")
    v.add_argument("--family", required=True)
    v.add_argument("--tol", type=float)
    v.add_argument("--convergence", action="store_true", help="also measure h-halving ratios")
    v.add_argument("--json", help="write the report JSON here")
    add_grid_opts(v)
    v.set_defaults(fn=cmd_verify)

    b = sub.add_parser("backlund", help="transformation runs")
    bsub = b.add_subparsers(dest="subcommand", required=True)
    br = bsub.add_parser("run", help="construct the partner solution by quadrature")
    br.add_argument("--direction", choices=("w2t", "t2w"), required=True)
    br.add_argument("--family", required=True)
    br.add_argument("--w00", type=float, default=0.0, help="w(0,0) for t2w")
    br.add_argument("--theta00", type=float, default=np.pi / 2, help="theta(0,0) for w2t")
    br.add_argument("--out", required=True)
    br.add_argument("--tol", type=float)
    br.add_argument("--json")
    add_grid_opts(br)
    br.set_defaults(fn=cmd_backlund_run)

    hm = sub.add_parser("harmonic", help="harmonic-map construction and checks")
    hsub = hm.add_subparsers(dest="subcommand", required=True)
    hb = hsub.add_parser("build", help="construct u = R + iS from a pair by quadrature")
    hb.add_argument("--pair", required=True,
                    help="'W_ID,THETA_ID' family ids or 'w.csv,theta.csv' files")
    hb.add_argument("--R0", type=float, default=0.0)
    hb.add_argument("--S0", type=float, default=1.0)
    hb.add_argument("--out", required=True, help="output prefix")
    hb.add_argument("--tol", type=float)
    hb.add_argument("--json")
    add_grid_opts(hb)
    hb.set_defaults(fn=cmd_harmonic_build)
    hv = hsub.add_parser("verify", help="check a map loaded from CSV")
    hv.add_argument("--u", required=True)
    hv.add_argument("--w", help="partner solution CSV for the correspondence check")
    hv.add_argument("--metric", help="target-metric family id for a curvature check")
    hv.add_argument("--tol", type=float)
    hv.add_argument("--json")
    hv.set_defaults(fn=cmd_harmonic_verify)

    acc = sub.add_parser("acceptance", help="run the full acceptance suite")
    acc.add_argument("--quick", action="store_true", help="h = 1/100 with tolerances x16")
    acc.add_argument("--h", type=float, default=acceptance.DEFAULT_H)
    acc.add_argument("--tol", type=float)
    acc.add_argument("--no-convergence", action="store_true")
    acc.add_argument("--json", help="write the report JSON here")
    acc.set_defaults(fn=cmd_acceptance)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

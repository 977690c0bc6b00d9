"""Command-line driver: ``minsurf generate | verify | hodograph``.

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .catalog import available
from .config import ConfigError, config_from_dict, load_config_file, parse_resolution
from .domains import Annulus, Rectangle
from .expr import EvaluationError, ExprError, evaluate, parse_expression
from .hodograph import GraphPatch, conformal_coordinates, recover_R
from .mesh import export_mesh, sample_mesh
from .report import EXIT_CONFIG, EXIT_FAIL, EXIT_NUMERIC, EXIT_PASS, dump_report, run_verification_report


def _floats(text: str, n: int, what: str):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        vals = []
    if len(vals) != n:
        raise ConfigError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def _write(path, blob: bytes):
    if path == "-":
        sys.stdout.buffer.write(blob)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(blob)


def cmd_generate(args) -> int:
    if args.surface.startswith("@"):
        config = load_config_file(args.surface[1:])
    elif args.surface in available():
        config = config_from_dict({"surface": {"catalog": args.surface}, "grid": {"resolution": (16, 16)}})
    else:
        raise ConfigError(f"unknown surface {args.surface!r}; available: {', '.join(available())}")
    res = parse_resolution(args.res) if args.res else None
    config = config.with_overrides(resolution=res, quadrature_tol=args.tol)
    data = config.weierstrass_data()
    mesh = sample_mesh(data, config)
    out = args.out or config.output.get("mesh")
    csv = args.csv or config.output.get("csv")
    if out is None and csv is None:
        raise ConfigError("nothing to write: give --out and/or --csv")
    if out is not None:
        _write(out, export_mesh(mesh, "OBJ"))
    if csv is not None:
        _write(csv, export_mesh(mesh, "CSV"))
    print(f"{data.name}: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces", file=sys.stderr)
    return EXIT_PASS


def cmd_verify(args) -> int:
    config = load_config_file(args.config).with_overrides(quadrature_tol=args.tol)
    report = run_verification_report(config)
    target = args.report or config.output.get("report")
    blob = dump_report(report)
    if target:
        _write(target, blob)
    else:
        sys.stdout.buffer.write(blob)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else ("ERROR" if "error" in check else "FAIL")
        detail = check.get("error") or f"max={check['max_abs_residual']!r}"
        print(f"{status:5s} {check['name']}: {detail}", file=sys.stderr)
    hodo = report["hodograph"]
    if hodo and hodo.get("status") == "degenerate":
        print(f"NOTE  hodograph: all {hodo['frames']} frames degenerate (umbilic)", file=sys.stderr)
    return report["exit_code"]


def _fmt(x: float) -> str:
    return f"{float(x) + 0.0:.17g}"


def cmd_hodograph(args) -> int:
    if (args.domain is None) == (args.annulus is None):
        raise ConfigError("give exactly one of --domain x0,x1,y0,y1 or --annulus r0,r1")
    if args.domain is not None:
        domain = Rectangle(*_floats(args.domain, 4, "--domain"))
    else:
        domain = Annulus(0j, *_floats(args.annulus, 2, "--annulus"))
    n1, n2 = parse_resolution(args.res)
    try:
        patch = GraphPatch.from_text(args.phi, domain)
        expected = parse_expression(args.expected_R, "w") if args.expected_R else None
    except ExprError as exc:
        raise ConfigError(str(exc)) from exc
    z = np.asarray(domain.from_chart(domain.chart_grid(n1, n2, interior=True)), dtype=complex).ravel()
    frames = conformal_coordinates(patch, np.column_stack([z.real, z.imag]))
    good = [f for f in frames if not f.degenerate and f.zeta != 0]
    rhat = dict(zip((id(f) for f in good), (r for _, r in recover_R(patch, good, args.method)))) if good else {}
    lines = ["x,y,u_re,u_im,zeta_re,zeta_im,Rhat_re,Rhat_im"]
    for f in frames:
        r = rhat.get(id(f), complex("nan+nanj"))
        lines.append(",".join(_fmt(v) for v in (f.x, f.y, f.u.real, f.u.imag, f.zeta.real, f.zeta.imag,
                                                   r.real, r.imag)))
    _write(args.out, ("\n".join(lines) + "\n").encode("ascii"))
    print(f"{len(frames)} frames, {len(frames) - len(good)} degenerate", file=sys.stderr)
    if expected is None:
        return EXIT_PASS
    errs = [abs(rhat[id(f)] - evaluate(expected, f.zeta)) / abs(evaluate(expected, f.zeta)) for f in good]
    worst = max(errs) if errs else float("inf")
    ok = worst < args.tol
    print(f"{'PASS' if ok else 'FAIL'} recover_R: max relative error {worst:.3e} (tol {args.tol:g})",
          file=sys.stderr)
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minsurf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a surface and export a mesh")
    g.add_argument("--surface", required=True, help="catalog name or @config.toml")
    g.add_argument("--out", help="OBJ output path ('-' for stdout)")
    g.add_argument("--csv", help="CSV output path")
    g.add_argument("--res", help="grid resolution N1xN2")
    g.add_argument("--tol", type=float, help="quadrature tolerance")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="run the verification battery and write a JSON report")
    v.add_argument("--config", required=True)
    v.add_argument("--report", help="JSON report path (default stdout)")
    v.add_argument("--tol", type=float, help="quadrature tolerance")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("hodograph", help="conformal coordinates and recovered R of a graph")
    h.add_argument("--phi", required=True, help='graph expression in x and y, e.g. "atan(y/x)"')
    h.add_argument("--domain", help="rectangle x0,x1,y0,y1")
    h.add_argument("--annulus", help="annulus r0,r1 about the origin, sampled in (log r, theta)")
    h.add_argument("--res", default="64x64")
    h.add_argument("--out", required=True, help="CSV output path ('-' for stdout)")
    h.add_argument("--method", choices=("jacobian", "mls"), default="jacobian")
    h.add_argument("--expected-R", dest="expected_R", help="reference R(w) to compare against")
    h.add_argument("--tol", type=float, default=1e-6, help="relative tolerance for --expected-R")
    h.set_defaults(func=cmd_hodograph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "tol", None) is not None and not args.tol > 0:
        print("minsurf: --tol must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except EvaluationError as exc:
        print(f"minsurf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, KeyError, ExprError, ValueError) as exc:
        print(f"minsurf: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"minsurf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"minsurf: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

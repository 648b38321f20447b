"""Command-line front end.

Every subcommand writes one report (JSON by default, CSV for traces) and
exits with 0 on success, 2 on rejected input, 3 on a failed certificate and
4 when a numerical procedure does not converge.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import engine, extra, lp, operators, repro, zerosets
from .errors import CertificationError, RkInnerError
from .spaces import space_from_spec

logger = logging.getLogger("rkinner")

SIG_DIGITS = 15


# ---------------------------------------------------------------------------
# serialization


def _clean(obj):
    """JSON-ready copy with floats rounded to ``SIG_DIGITS`` significant digits."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        x = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if x == 0 else x
    return obj


def dumps(report):
    """Deterministic JSON text (sorted keys, fixed float rounding)."""
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _pairs(values):
    return [[complex(v).real, complex(v).imag] for v in values]


# ---------------------------------------------------------------------------
# input parsing


def parse_complex(text):
    """``0.5``, ``-0.3+0.2i``, ``0.5i`` or ``1e-3-2e-2j``."""
    t = text.strip().replace(" ", "")
    if not t:
        raise argparse.ArgumentTypeError("empty number")
    t = t.replace("I", "j").replace("i", "j")
    if t in ("j", "+j", "-j"):
        t = t.replace("j", "1j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex literal {text!r}") from None


def parse_list(text):
    return [parse_complex(x) for x in text.split(",") if x.strip()]


def parse_grid(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError("grid must look like 256x128") from None


def _load_points_file(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, list):
        data = {"points": data}
    pts = []
    for x in data.get("points", []):
        pts.append(complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x))
    return pts, data.get("multiplicities")


def _points(args, required=True):
    if args.points_file:
        pts, mults = _load_points_file(args.points_file)
    else:
        pts, mults = (args.zeros or []), None
    if required and not pts:
        raise RkInnerError("no points given: use --zeros or --points-file")
    return pts, mults


def _config(args):
    pts, mults = _points(args)
    return engine.ZeroConfig.from_points(pts, mults)


def _space(args):
    return space_from_spec(args.space)


# ---------------------------------------------------------------------------
# subcommands


def cmd_inner(args):
    space = _space(args)
    config = _config(args)
    rep = engine.solve_inner(space, config, tol=args.tol)
    out = {
        "space": space.spec(),
        "tol": args.tol,
        "points": _pairs(config.points),
        "multiplicities": list(config.multiplicities),
        **rep.to_dict(),
    }
    if len(config) == 1 and config.multiplicities[0] == 1:
        cf = engine.closed_form_one_point(space, config.points[0])
        out["closed_form"] = {
            "coefficients": _pairs(cf.coefficients),
            "max_difference": float(np.max(np.abs(cf.coefficients - rep.coefficients))),
        }
    return out


def cmd_zeroset(args):
    space = _space(args)
    pts, _ = _points(args)
    n_max = args.n_max or len(pts)
    finite = not args.prefix if args.prefix else None
    verdict = zerosets.zero_set_certificate(space, pts, n_max, args.bound, args.tol, finite)
    try:
        eigs, prods, ss = zerosets.shapiro_shields(space, pts, n_max, args.tol)
        verdict.psd_min_eigenvalues = eigs
        verdict.partial_products = prods
    except RkInnerError as exc:
        ss = f"skipped: {exc}"
    if args.format == "csv":
        return zerosets.verdict_trace_csv(verdict)
    return {
        "space": space.spec(),
        "tol": args.tol,
        "n_max": n_max,
        "shapiro_shields": ss,
        **verdict.to_dict(),
    }


def cmd_extra(args):
    space = _space(args)
    if args.action == "bound":
        pts, _ = _points(args)
        rows = []
        for w in pts:
            b, rep = extra.extra_zero_lower_bound(space, w, return_report=True)
            rows.append({"w": [w.real, w.imag], "bound": b, **rep.to_dict()})
        return {"space": space.spec(), "bounds": rows}
    if args.action == "detr":
        pts, _ = _points(args)
        if args.candidate is None:
            raise RkInnerError("extra detr needs --candidate")
        c = args.candidate
        det = extra.det_r_residual(space, pts, c, args.tol)
        rel = extra.det_r_residual(space, pts, c, args.tol, relative=True)
        J = engine.solve_inner(space, pts, tol=args.tol)
        return {
            "space": space.spec(),
            "tol": args.tol,
            "zeros": _pairs(pts),
            "candidate": [c.real, c.imag],
            "det_r": [det.real, det.imag],
            "det_r_relative": rel,
            "abs_J_at_candidate": abs(J(c)),
        }
    if args.action == "scan":
        config = _config(args)
        grid = args.grid or (256, 128)
        findings, scan = extra.scan_extra_zeros(
            space, config, args.r_max, grid, tol=1e-8, return_scan=True
        )
        if args.format == "csv":
            return scan.heatmap_csv()
        return {
            "space": space.spec(),
            "tol": args.tol,
            "zeros": _pairs(config.points),
            "r_max": args.r_max,
            "zero_tolerance": 1e-8,
            "grid": list(grid),
            "findings": [f.to_dict() for f in findings],
        }
    if args.action == "phizeta":
        if space.family != "phi" or len(space.phi.a) != 2:
            raise RkInnerError("phizeta needs --space phi:a1,a2")
        pts, _ = _points(args)
        a1, a2 = space.phi.a
        rows = []
        for w in pts:
            z = extra.phi_space_extra_zero(a1, a2, w)
            J = engine.solve_inner(space, [w], tol=args.tol)
            rows.append({"w": [w.real, w.imag], "zeta": [z.real, z.imag], "abs_J": abs(J(z))})
        return {"space": space.spec(), "tol": args.tol, "extra_zeros": rows}
    raise RkInnerError(f"unknown extra action {args.action!r}")


def cmd_lp(args):
    p = args.p
    if args.action == "inner":
        pts, _ = _points(args, required=False)
        J, report = lp.lp_inner_function(p, pts, D=args.degree, tol=args.tol)
        return {
            "p": p,
            "tol": args.tol,
            "points": _pairs(pts),
            "D": report.D,
            "norms": [v for _, v in report.norms_by_D],
            "norm": J.norm(),
            "J_coefficients": _pairs(J.coefficients),
            "bj_residual_max": report.bj_residual_max,
            "report": report.to_dict(),
        }
    if args.action == "project":
        if not args.coeffs:
            raise RkInnerError("lp project needs --coeffs")
        f = np.asarray(args.coeffs, dtype=complex)
        D = args.degree or 8
        B = lp._shift_basis(f, D)
        res = lp.metric_project(lp.LpSeries(np.pad(f, (0, B.shape[0] - f.size)), p), B,
                                tol=args.tol)
        return {
            "p": p,
            "tol": args.tol,
            "D": D,
            "f": _pairs(f),
            "beta": _pairs(res.beta),
            "residual": _pairs(res.residual.coefficients),
            "residual_norm": res.residual.norm(),
            "bj_residual_max": res.bj_max,
            "iterations": res.iterations,
        }
    pts, _ = _points(args)
    if args.action == "trace":
        norms = lp.lp_zero_set_trace(p, pts, args.n_max, args.degree, args.tol)
        if args.format == "csv":
            lines = ["n,norm"] + [f"{i + 1},{v!r}" for i, v in enumerate(norms)]
            return "\n".join(lines) + "\n"
        return {"p": p, "tol": args.tol, "points": _pairs(pts), "D": args.degree, "norms": norms}
    if args.action == "dual":
        val = lp.dual_infimum_norm(p, pts, D=args.degree, tol=args.tol)
        return {"p": p, "tol": args.tol, "points": _pairs(pts), "D": args.degree,
                "norm": val, "infimum": 1.0 / val}
    raise RkInnerError(f"unknown lp action {args.action!r}")


def _operator(args):
    vec = None
    if args.operator_file:
        op, vec = operators.load_operator_json(args.operator_file)
    elif args.kind:
        params = json.loads(args.params) if args.params else {}
        op = operators.make_example_operator(args.kind, params)
    else:
        raise RkInnerError("give --operator-file or --kind")
    if args.vector:
        vec = np.asarray(args.vector, dtype=complex)
    return op, vec


def cmd_op(args):
    op, v = _operator(args)
    if args.action == "example":
        return op.to_dict()
    if v is None:
        raise RkInnerError("this action needs a vector (--vector or the operator file)")
    tol = args.tol
    if args.action == "krylov":
        u = operators.krylov_inner(op, v, tol=tol)
        Q, cut = operators.krylov_basis(op, v, tol)
        if np.any(np.abs(u) > 0):
            cand = operators.check_inner(op, u, args.n_max, tol)
            cand.krylov_rank, cand.rank_cut_index = Q.shape[1], cut
            return {"label": op.label, **cand.to_dict()}
        return {"label": op.label, "vector": _pairs(u), "zero": True,
                "krylov_rank": Q.shape[1], "rank_cut_index": cut}
    if args.action == "check":
        cand = operators.check_inner(op, v, args.n_max, tol)
        if op.approximate:
            cand.extra["tolerance_hint"] = op.tolerance_hint
        return {"label": op.label, **cand.to_dict()}
    if args.action == "adjoint":
        a = operators.check_inner(op, v, args.n_max, tol)
        b = operators.check_inner(op.adjoint(), v, args.n_max, tol)
        return {"label": op.label, "agree": a.certified == b.certified,
                "T": a.to_dict(), "T_adjoint": b.to_dict()}
    raise RkInnerError(f"unknown op action {args.action!r}")


def cmd_repro(args):
    results = repro.run_all(seed=args.seed or 0)
    if args.format == "csv":
        lines = ["criterion,passed,elapsed_s,detail"]
        for r in results:
            detail = r.detail.replace('"', "'")
            lines.append(f'{r.key},{r.passed},{r.elapsed:.3f},"{detail}"')
        return "\n".join(lines) + "\n", results
    return {"results": [r.to_dict() for r in results],
            "all_passed": all(r.passed for r in results)}, results


# ---------------------------------------------------------------------------
# parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance (default 1e-10; 1e-12 for op)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default="-", help="output path ('-' for stdout)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    pts = argparse.ArgumentParser(add_help=False)
    pts.add_argument("--zeros", type=parse_list, help="comma-separated points, e.g. 0.5,-0.3+0.2i")
    pts.add_argument("--points-file", help='JSON {"points": [[re, im], ...], "multiplicities": [...]}')

    sp = argparse.ArgumentParser(add_help=False)
    sp.add_argument("--space", default="hardy",
                    help="hardy, dirichlet, bergman, korenblum, phi:a1,a2,... or custom:l0,l1,...")

    parser = argparse.ArgumentParser(prog="rkinner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inner", parents=[common, pts, sp], help="solve for J and cross-check")
    p.set_defaults(func=cmd_inner)

    p = sub.add_parser("zeroset", parents=[common, pts, sp], help="zero-set certificate")
    p.add_argument("--n-max", type=int)
    p.add_argument("--bound", type=float, default=1e3)
    p.add_argument("--prefix", action="store_true",
                   help="treat the points as a prefix of an infinite sequence")
    p.set_defaults(func=cmd_zeroset)

    p = sub.add_parser("extra", parents=[common, pts, sp], help="extra zeros")
    p.add_argument("action", choices=("bound", "detr", "scan", "phizeta"))
    p.add_argument("--r-max", type=float, default=0.99)
    p.add_argument("--grid", type=parse_grid, help="angles x radii, e.g. 256x128")
    p.add_argument("--candidate", type=parse_complex)
    p.set_defaults(func=cmd_extra)

    p = sub.add_parser("lp", parents=[common, pts], help="l^p inner functions")
    p.add_argument("action", choices=("inner", "project", "trace", "dual"))
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--degree", type=int, help="multiplier degree D")
    p.add_argument("--n-max", type=int)
    p.add_argument("--coeffs", type=parse_list, help="coefficients of f for 'project'")
    p.set_defaults(func=cmd_lp)

    p = sub.add_parser("op", parents=[common], help="finite-dimensional T-inner vectors")
    p.add_argument("action", choices=("krylov", "check", "adjoint", "example"))
    p.add_argument("--operator-file")
    p.add_argument("--kind", choices=("compressed_shift", "compressed_shift_power",
                                      "toeplitz_truncation", "weighted_shift"))
    p.add_argument("--params", help='JSON parameters, e.g. {"n": 4, "k": 2}')
    p.add_argument("--vector", type=parse_list)
    p.add_argument("--n-max", type=int)
    p.set_defaults(func=cmd_op)

    p = sub.add_parser("repro", parents=[common], help="run the acceptance suite")
    p.set_defaults(func=cmd_repro)
    return parser


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.tol is None:
        args.tol = 1e-12 if args.command == "op" else 1e-10
    if not args.tol > 0:
        print("rkinner: --tol must be positive", file=sys.stderr)
        return 2
    try:
        out = args.func(args)
        status = 0
        if args.command == "repro":
            out, results = out
            status = 0 if all(r.passed for r in results) else CertificationError.exit_code
            for r in results:
                print(r.line(), file=sys.stderr)
        _write(out if isinstance(out, str) else dumps(out), args.output)
        return status
    except RkInnerError as exc:
        print(f"rkinner: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = getattr(exc, "exit_code", 1)
        return 2 if code == 1 else code
    except ValueError as exc:
        print(f"rkinner: invalid input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"rkinner: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

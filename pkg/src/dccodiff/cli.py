"""
Command-line front end.

    dccodiff check FILE [--point X ...] [--lambda L] [--route R]
    dccodiff mcd   FILE [--point X ...] [--alpha-star A] [--mu M] [--max-iters N]
    dccodiff info  FILE [--slope V ...]
    dccodiff gen-disk N

Exit codes: 0 optimal (or success), 1 not optimal, 2 hypothesis failure or
usage error. ``--format machine`` prints one JSON document (schema "v1").
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import supportset as ss
from .dcmodel import Affine, Max, build_dc
from .geometry import Polytope
from .mcd import McdParams, mcd_run
from .optimality import (
    TOL_OPT, CertificateError, OptimalityReport, UnboundedError, bounded_below_witness,
    check_constrained, check_global_min,
)
from .penalty import Problem, build_penalty
from .problemfile import ROUTES, ProblemFile, parse_problem_file, serialize

SCHEMA = "v1"
EXIT_OPTIMAL, EXIT_NOT_OPTIMAL, EXIT_HYPOTHESIS = 0, 1, 2

PENALTY_CAVEATS = (
    "penalty route: the result is about F_lambda; it transfers to the constrained problem "
    "only if the penalty is exact for this lambda",
    "exactness hypotheses (error bound, constraint qualification, bounded C_alpha) are not verified",
)


class UsageError(Exception):
    pass


def _f(x):
    """JSON-safe float; non-finite values become strings."""
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _vec(v):
    return None if v is None else [_f(t) for t in np.asarray(v, dtype=float).ravel()]


def _is_tuple_key(z) -> bool:
    # constrained checks key verdicts by a tuple of support points
    return isinstance(z, tuple) and bool(z) and hasattr(z[0], "a")


def _z(z):
    if _is_tuple_key(z):
        return [_z(t) for t in z]
    return [_f(z.a)] + [_f(t) for t in z.v]


def _g(x) -> str:
    return "%.17g" % x


def _gv(v) -> str:
    return "(" + ", ".join(_g(t) for t in np.asarray(v, dtype=float).ravel()) + ")"


def report_doc(rep: OptimalityReport) -> dict:
    return {
        "route": rep.route,
        "point": _vec(rep.base_point),
        "value": _f(rep.base_value),
        "globally_optimal": rep.globally_optimal,
        "verdicts": [
            {
                "z": _z(vd.z), "a": _f(vd.a_z), "v": _vec(vd.v_z), "satisfied": vd.satisfied,
                "marginal": vd.marginal, "descent_point": _vec(vd.descent_point),
                "descent_value": None if vd.descent_value is None else _f(vd.descent_value),
            }
            for vd in rep.verdicts
        ],
        "best_descent": None if rep.best_descent is None else {
            "point": _vec(rep.best_descent[0]), "value": _f(rep.best_descent[1])},
        "notes": list(rep.notes),
    }


def _report_text(rep: OptimalityReport) -> list[str]:
    lines = [f"route: {rep.route}", f"point: {_gv(rep.base_point)}  value: {_g(rep.base_value)}"]
    for vd in rep.verdicts:
        keys = vd.z if _is_tuple_key(vd.z) else (vd.z,)
        zs = " ".join(_gv([t.a, *t.v]) for t in keys)
        tag = "ok" if vd.satisfied else "FAIL"
        line = f"  z = {zs}: a = {_g(vd.a_z)}, v = {_gv(vd.v_z)} [{tag}]"
        if vd.marginal:
            line += " (marginal)"
        if vd.descent_point is not None:
            line += f" -> {_gv(vd.descent_point)} value {_g(vd.descent_value)}"
        lines.append(line)
    lines += [f"note: {n}" for n in rep.notes]
    lines.append("GLOBALLY OPTIMAL" if rep.globally_optimal else "NOT OPTIMAL")
    if rep.best_descent is not None:
        lines.append(f"best descent point: {_gv(rep.best_descent[0])} value {_g(rep.best_descent[1])}")
    return lines


def _emit(args, doc: dict, text: list[str]):
    doc = {"schema": SCHEMA, **doc}
    if args.format == "machine":
        print(json.dumps(doc, indent=2, allow_nan=False))
    else:
        print("\n".join(text))


def _load(path: str) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem_file(fh.read(), path)


def _point(args, pf: ProblemFile) -> np.ndarray:
    pt = args.point if args.point is not None else pf.point
    if pt is None:
        raise UsageError("no point given (use --point or a 'point:' line)")
    x = np.asarray(pt, dtype=float)
    if x.size != pf.problem.dim:
        raise UsageError(f"point has dimension {x.size}, problem has {pf.problem.dim}")
    return x


def _lam(args, pf: ProblemFile) -> float:
    lam = args.lam if args.lam is not None else pf.lam
    if lam is None:
        raise UsageError("the penalty route needs --lambda (or a 'lambda:' line)")
    return lam


def _route(args, pf: ProblemFile) -> str:
    route = args.route if args.route != "auto" else pf.route
    p = pf.problem
    if route == "auto":
        if p.equalities:
            route = "penalty"
        elif p.inequalities:
            route = "constrained"
        else:
            route = "unconstrained"
    if route == "constrained" and p.equalities:
        raise UsageError("equality constraints need the penalty route")
    if route == "unconstrained" and (p.inequalities or p.equalities):
        raise UsageError("problem has constraints; use the constrained or penalty route")
    return route


def cmd_check(args) -> int:
    pf = _load(args.file)
    x = _point(args, pf)
    tol = args.tol_opt if args.tol_opt is not None else (pf.tol_opt or TOL_OPT)
    route = _route(args, pf)
    p = pf.problem
    extra = {}
    try:
        if route == "unconstrained":
            rep = check_global_min(build_dc(p.objective, p.dim), x, tol_opt=tol)
        elif route == "constrained":
            if not p.ipcq_asserted:
                msg = "the constrained check needs 'ipcq: true' (interior-point qualification asserted)"
                _emit(args, {"command": "check", "error": msg, "exit_code": EXIT_HYPOTHESIS}, [f"error: {msg}"])
                return EXIT_HYPOTHESIS
            rep = check_constrained(
                build_dc(p.objective, p.dim), [build_dc(g, p.dim) for g in p.inequalities], x,
                ipcq=True, ipcq_note=p.ipcq_note, tol_opt=tol)
        else:
            lam = _lam(args, pf)
            rep = check_global_min(build_penalty(p, lam), x, tol_opt=tol)
            rep.notes.extend(PENALTY_CAVEATS)
            extra = {"lambda": _f(lam), "feasible": p.is_feasible(x)}
    except UnboundedError as e:
        msg = f"hypothesis failure: {e}"
        doc = {"command": "check", "error": msg, "direction": _vec(e.direction), "exit_code": EXIT_HYPOTHESIS}
        _emit(args, doc, [f"error: {msg}", f"direction: {_gv(e.direction)}"])
        return EXIT_HYPOTHESIS
    code = EXIT_OPTIMAL if rep.globally_optimal else EXIT_NOT_OPTIMAL
    doc = {"command": "check", **extra, **report_doc(rep), "exit_code": code}
    _emit(args, doc, _report_text(rep))
    return code


def cmd_mcd(args) -> int:
    pf = _load(args.file)
    x0 = _point(args, pf)
    p = pf.problem
    route = _route(args, pf)
    if route == "constrained":
        raise UsageError("descent runs on the objective or on the penalty function; use --route penalty")
    f = build_dc(p.objective, p.dim) if route == "unconstrained" else build_penalty(p, _lam(args, pf))
    alpha = args.alpha_star if args.alpha_star is not None else pf.alpha_star
    if alpha is None:
        raise UsageError("descent needs --alpha-star (or an 'alpha_star:' line)")
    params = McdParams(
        alpha_star=alpha,
        max_iters=args.max_iters or pf.max_iters or 1000,
        mu=args.mu if args.mu is not None else (pf.mu if pf.mu is not None else math.inf),
    )
    try:
        trace = mcd_run(f, x0, params)
    except UnboundedError as e:
        msg = f"hypothesis failure: {e}"
        doc = {"command": "mcd", "error": msg, "direction": _vec(e.direction), "exit_code": EXIT_HYPOTHESIS}
        _emit(args, doc, [f"error: {msg}", f"direction: {_gv(e.direction)}"])
        return EXIT_HYPOTHESIS
    code = EXIT_OPTIMAL if trace.verdict.globally_optimal else EXIT_NOT_OPTIMAL
    doc = {
        "command": "mcd",
        "route": route,
        "iterates": [{"x": _vec(s.x), "value": _f(s.value), "z": _z(s.z), "v": _vec(s.v), "alpha": _f(s.alpha)}
                     for s in trace.iterates],
        "x_final": _vec(trace.x_final),
        "f_final": _f(trace.f_final),
        "stop_reason": trace.reason,
        "verdict": report_doc(trace.verdict),
        "exit_code": code,
    }
    text = [f"{k:4d}  x = {_gv(s.x)}  f = {_g(s.value)}  alpha = {_g(s.alpha)}" for k, s in enumerate(trace.iterates)]
    text += [f"final x = {_gv(trace.x_final)}  f = {_g(trace.f_final)}  ({trace.reason})"]
    text += _report_text(trace.verdict)
    _emit(args, doc, text)
    return code


def cmd_info(args) -> int:
    pf = _load(args.file)
    p = pf.problem
    if p.inequalities or p.equalities:
        raise UsageError("info works on unconstrained files only")
    f = build_dc(p.objective, p.dim)
    convex = len(f.minus) == 1 and not np.any(f.minus.vertices[0])
    doc = {"command": "info", "dim": p.dim, "convex": convex, "support_vertices": len(f.plus)}
    text = [f"dim: {p.dim}", f"convex: {convex}"]
    if not convex:
        ok, _ = bounded_below_witness(f, np.zeros(p.dim))
        doc["bounded_below"] = ok
        text += [f"bounded below: {ok}", "infimum and conjugate values need a convex objective"]
        _emit(args, {**doc, "exit_code": 0}, text)
        return 0
    S: Polytope = f.plus
    bounded = ss.is_bounded_below(S)
    doc["bounded_below"] = bounded
    text.append(f"bounded below: {bounded}")
    if bounded:
        inf = ss.infimum(S)
        xmin = ss.attained_minimizer(S)
        doc.update(infimum=_f(inf), attained=xmin is not None, minimizer=_vec(xmin))
        text += [f"infimum: {_g(inf)}", f"attained: {xmin is not None}"]
        if xmin is not None:
            text.append(f"minimizer: {_gv(xmin)}")
    else:
        doc["direction"] = _vec(ss.slope_gap(S).point)
    slopes = [tuple(s) for s in (args.slope or [])] or list(pf.slopes)
    conj = []
    for s in slopes:
        if len(s) != p.dim:
            raise UsageError(f"slope {s} has the wrong dimension")
        val = ss.conjugate_value(S, s)
        conj.append({"slope": _vec(s), "sup_a": _f(val)})
        text.append(f"sup{{a : (a, v) in S}} at v = {_gv(s)}: {_g(val)}")
    doc["conjugate"] = conj
    _emit(args, {**doc, "exit_code": 0}, text)
    return 0


def disk_polygon(n: int) -> Max:
    """Regular n-gon inscribed in the disk centred at (-1, 1) with radius 1, as a max of affine pieces."""
    if n < 4 or n % 4:
        raise ValueError("n must be a positive multiple of 4 (so that (-1, 0) is a vertex)")
    th = 2 * np.pi * np.arange(n) / n
    a, v = -1.0 + np.cos(th), 1.0 + np.sin(th)
    # exact values on the axes keep the slope-zero vertex exact
    a[np.isclose(a, -1.0, atol=1e-15)] = -1.0
    v[np.abs(v) < 1e-15] = 0.0
    return Max(tuple(Affine(float(ai), (float(vi),)) for ai, vi in zip(a, v)))


def cmd_gen_disk(args) -> int:
    text = serialize(ProblemFile(Problem(1, disk_polygon(args.n)), point=(0.0,)))
    print(f"# regular {args.n}-gon inscribed in {{(a + 1)^2 + (v - 1)^2 <= 1}}")
    print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dccodiff", description=__doc__.split("\n\n")[0].strip())
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file")
        sp.add_argument("--format", choices=("text", "machine"), default="text")

    c = sub.add_parser("check", help="global optimality check at a point")
    common(c)
    c.add_argument("--point", type=float, nargs="+")
    c.add_argument("--lambda", dest="lam", type=float)
    c.add_argument("--route", choices=ROUTES, default="auto")
    c.add_argument("--tol-opt", type=float)
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("mcd", help="codifferential descent")
    common(m)
    m.add_argument("--point", type=float, nargs="+", help="starting point")
    m.add_argument("--lambda", dest="lam", type=float)
    m.add_argument("--route", choices=ROUTES, default="auto")
    m.add_argument("--alpha-star", type=float)
    m.add_argument("--mu", type=float)
    m.add_argument("--max-iters", type=int)
    m.set_defaults(func=cmd_mcd)

    i = sub.add_parser("info", help="boundedness, infimum and conjugate values of a convex objective")
    common(i)
    i.add_argument("--slope", type=float, nargs="+", action="append")
    i.set_defaults(func=cmd_info)

    g = sub.add_parser("gen-disk", help="print the n-gon disk problem file")
    g.add_argument("n", type=int)
    g.set_defaults(func=cmd_gen_disk)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as e:
        # includes DimensionError
        print(f"dccodiff: error: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except SyntaxError as e:
        print(f"{e.filename}:{e.lineno}:{e.offset}: syntax error: {e.msg}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (CertificateError, OSError) as e:
        print(f"dccodiff: error: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())

"""
Global optimality checks for piecewise-affine DC functions.

For each extreme point ``z`` of the hyperdifferential at ``x*``, the min-norm
point ``(a(z), v(z))`` of ``hypo + z`` decides optimality: ``x*`` is a global
minimizer iff ``a(z) >= 0`` for every ``z``. A negative ``a(z)`` comes with the
better point ``x* + v(z) / a(z)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .dcmodel import DCFunction, canonical_order, global_codifferential, hyper_extreme_points
from .geometry import Polytope, SupportPoint
from .linprog import LpProblem, LpStatus, solve_lp
from .minnorm import min_norm_point, min_norm_rows

TOL_OPT = 1e-8
TOL_FEAS = 1e-9
# slack on "strictly smaller" when verifying an emitted descent point
TOL_DESCENT = 1e-9
MAX_CONSTRAINTS = 6
MAX_EXTREME = 16


class UnboundedError(ValueError):
    """The function is unbounded (below, or above for maximization checks).

    ``direction`` is a certificate: ``f(x - t * direction) -> -inf`` as ``t -> inf``
    (for maximization checks, ``-f`` decreases along it).
    """

    def __init__(self, message: str, direction: np.ndarray | None = None):
        super().__init__(message)
        self.direction = direction


class CertificateError(ArithmeticError):
    """An emitted descent point failed numerical verification."""


@dataclass(frozen=True, eq=False)
class ZVerdict:
    z: SupportPoint | tuple[SupportPoint, ...]
    a_z: float
    v_z: np.ndarray
    satisfied: bool
    descent_point: np.ndarray | None = None
    descent_value: float | None = None
    marginal: bool = False


@dataclass(frozen=True, eq=False)
class OptimalityReport:
    base_point: np.ndarray
    base_value: float
    verdicts: list[ZVerdict]
    globally_optimal: bool
    best_descent: tuple[np.ndarray, float] | None = None
    route: str = "min-norm"
    notes: list[str] = field(default_factory=list)

    @property
    def failing(self) -> list[ZVerdict]:
        return [v for v in self.verdicts if not v.satisfied]


def _report(x, fx, verdicts, route, notes=(), maximize=False) -> OptimalityReport:
    sign = -1.0 if maximize else 1.0
    best = None
    for vd in verdicts:
        if vd.descent_point is not None and (best is None or sign * vd.descent_value < sign * best[1]):
            best = (vd.descent_point, vd.descent_value)
    return OptimalityReport(
        base_point=x, base_value=fx, verdicts=verdicts,
        globally_optimal=all(vd.satisfied for vd in verdicts),
        best_descent=best, route=route, notes=list(notes),
    )


def _unbounded_direction(hypo: Polytope, z: np.ndarray) -> np.ndarray:
    # slopes of hypo + z miss the origin; the min-norm slope is a descent ray
    return min_norm_rows(hypo.v + z[1:]).point


def bounded_below_witness(f: DCFunction, x_star):
    """Per-extreme-point boundedness test at ``x_star``.

    Returns ``(True, None)`` when ``0`` is a slope of ``hypo + z`` for every
    extreme ``z``, else ``(False, direction)`` with a descent-to-minus-infinity ray.
    """
    cd = global_codifferential(f, x_star)
    for z in hyper_extreme_points(f, x_star):
        n = len(cd.hypo)
        A = np.vstack([(cd.hypo.v + z[1:]).T, np.ones((1, n))])
        rhs = np.concatenate([np.zeros(f.dim), [1.0]])
        out = solve_lp(LpProblem(np.zeros(n), A, ("=",) * A.shape[0], rhs))
        if out.status is LpStatus.INFEASIBLE:
            return False, _unbounded_direction(cd.hypo, z)
    return True, None


def bounded_below_codiff(f: DCFunction, x_star) -> bool:
    """``f`` is bounded below iff every ``hypo(x*) + z`` meets the line ``R x {0}``."""
    return bounded_below_witness(f, x_star)[0]


def _descent(f, x, fx, a, v):
    point = x + v / a
    value = f(point)
    if not value < fx + TOL_DESCENT:
        raise CertificateError(f"descent point {point} does not decrease f ({value} vs {fx})")
    return point, value


def check_global_min(f: DCFunction, x_star, tol_opt: float = TOL_OPT, check_bounded: bool = True) -> OptimalityReport:
    """Min-norm optimality test at ``x_star``; requires ``f`` bounded below."""
    x = np.asarray(x_star, dtype=float).ravel()
    if check_bounded:
        ok, direction = bounded_below_witness(f, x)
        if not ok:
            raise UnboundedError("function is unbounded below", direction)
    cd = global_codifferential(f, x)
    verdicts = []
    for z in hyper_extreme_points(f, x):
        mn = min_norm_point(geo.translate(cd.hypo, z))
        a, v = mn.a, mn.v
        if a >= -tol_opt:
            verdicts.append(ZVerdict(SupportPoint.from_array(z), a, v, True, marginal=a < 0))
        else:
            point, value = _descent(f, x, cd.f_at_base, a, v)
            verdicts.append(ZVerdict(SupportPoint.from_array(z), a, v, False, point, value))
    return _report(x, cd.f_at_base, verdicts, "min-norm")


def check_global_max(f: DCFunction, x_star, tol_opt: float = TOL_OPT) -> OptimalityReport:
    """Global-maximum test, roles of hypo and hyper swapped.

    For each extreme ``z`` of the hypodifferential, ``(b(z), w(z))`` is the
    min-norm point of ``hyper + z``; ``x*`` is a global maximizer iff every
    ``b(z) <= 0``. Reported ``a_z``/``v_z`` hold ``b(z)``/``w(z)``, and a failing
    ``z`` yields the better (larger) point ``x* + w(z) / b(z)``.
    """
    x = np.asarray(x_star, dtype=float).ravel()
    ok, direction = bounded_below_witness(f.negated(), x)
    if not ok:
        raise UnboundedError("function is unbounded above", direction)
    cd = global_codifferential(f, x)
    verdicts = []
    for z in canonical_order(geo.prune_to_extreme(cd.hypo).vertices):
        mn = min_norm_point(geo.translate(cd.hyper, z))
        b, w = mn.a, mn.v
        if b <= tol_opt:
            verdicts.append(ZVerdict(SupportPoint.from_array(z), b, w, True, marginal=b > 0))
        else:
            point = x + w / b
            value = f(point)
            if not value > cd.f_at_base - TOL_DESCENT:
                raise CertificateError(f"ascent point {point} does not increase f")
            verdicts.append(ZVerdict(SupportPoint.from_array(z), b, w, False, point, value))
    return _report(x, cd.f_at_base, verdicts, "min-norm/max", maximize=True)


def _sampled_unbounded(f0: DCFunction, constraints, x) -> bool:
    # heuristic: a sampled ray that stays feasible far out while f0 keeps dropping
    d = f0.dim
    rng = np.random.default_rng(0)
    dirs = np.vstack([np.eye(d), -np.eye(d), rng.normal(size=(500, d))])
    for u in dirs / np.linalg.norm(dirs, axis=1, keepdims=True):
        pts = [x + r * u for r in (1e2, 1e3, 1e4)]
        if not all(g(p) <= TOL_FEAS for p in pts for g in constraints):
            continue
        vals = [f0(p) for p in pts]
        if vals[0] > vals[1] > vals[2]:
            return True
    return False


def check_constrained(
    f0: DCFunction,
    constraints: list[DCFunction],
    x_star,
    ipcq: bool = False,
    ipcq_note: str = "",
    tol_opt: float = TOL_OPT,
    max_constraints: int = MAX_CONSTRAINTS,
    max_extreme: int = MAX_EXTREME,
) -> OptimalityReport:
    """Global optimality for ``min f0 s.t. f_i <= 0`` at a feasible ``x_star``.

    Enumerates every tuple ``z = (z_0, ..., z_l)`` of hyperdifferential extreme
    points and projects the origin onto

        L(z) = conv{ hypo f0 + z_0,  hypo f_i + z_i + (f_i(x*), 0) }.

    The interior-point constraint qualification is taken on trust (``ipcq``);
    the report records it. Every descent point is checked to improve ``f0``
    and to satisfy all constraints strictly.
    """
    x = np.asarray(x_star, dtype=float).ravel()
    if not constraints:
        return check_global_min(f0, x, tol_opt=tol_opt)
    values = [g(x) for g in constraints]
    if max(values) > TOL_FEAS:
        raise ValueError(f"x_star is infeasible: constraint values {values}")
    if len(constraints) > max_constraints:
        raise ValueError(f"{len(constraints)} constraints exceed the enumeration limit {max_constraints}")
    notes = [f"IPCQ asserted: {ipcq}" + (f" ({ipcq_note})" if ipcq_note else "")]
    if not ipcq:
        notes.append("IPCQ not asserted: a satisfied check does not certify global optimality")
    if _sampled_unbounded(f0, constraints, x):
        notes.append("warning: f0 looks unbounded below on the feasible set (sampling heuristic)")

    funcs = [f0] + list(constraints)
    cds = [global_codifferential(g, x) for g in funcs]
    Cs = [hyper_extreme_points(g, x) for g in funcs]
    for C in Cs:
        if len(C) > max_extreme:
            raise ValueError(f"{len(C)} extreme points exceed the enumeration limit {max_extreme}")
    shifts = [0.0] + values
    f0x = cds[0].f_at_base

    verdicts = []
    for combo in itertools.product(*Cs):
        pieces = []
        for cd, z, s in zip(cds, combo, shifts):
            t = np.array(z, dtype=float)
            t[0] += s
            pieces.append(geo.translate(cd.hypo, t))
        mn = min_norm_point(geo.conv_union(pieces))
        a, v = mn.a, mn.v
        key = tuple(SupportPoint.from_array(z) for z in combo)
        if a >= -tol_opt:
            verdicts.append(ZVerdict(key, a, v, True, marginal=a < 0))
            continue
        point = x + v / a
        value = f0(point)
        cvals = [g(point) for g in constraints]
        if not (value < f0x + TOL_DESCENT and max(cvals) < TOL_DESCENT):
            raise CertificateError(f"descent point {point} failed verification: f0={value}, f_i={cvals}")
        verdicts.append(ZVerdict(key, a, v, False, point, value))
    return _report(x, f0x, verdicts, "min-norm/constrained", notes)


def _lp_xi(hypo: Polytope, z: np.ndarray) -> float:
    """``max { a : (a, 0) in hypo + z }``; ``-inf`` if the line misses the set."""
    n = len(hypo)
    A = np.vstack([(hypo.v + z[1:]).T, np.ones((1, n))])
    rhs = np.concatenate([np.zeros(hypo.dim), [1.0]])
    out = solve_lp(LpProblem(hypo.a + z[0], A, ("=",) * A.shape[0], rhs))
    if out.status is LpStatus.INFEASIBLE:
        return -math.inf
    return float(out.value)


def _lp_descent_step(hypo: Polytope, z: np.ndarray) -> np.ndarray:
    """A step ``dx`` where ``max_{hypo + z}(a + <v, dx>) < 0``.

    LP over ``(t, dx)``: minimize ``t >= -1`` subject to ``a_i + <v_i, dx> <= t``.
    """
    d = hypo.dim
    V = hypo.v + z[1:]
    a = hypo.a + z[0]
    c = np.concatenate([[-1.0], np.zeros(d)])
    A = np.column_stack([-np.ones(len(hypo)), V])
    lower = np.concatenate([[-1.0], np.full(d, -np.inf)])
    out = solve_lp(LpProblem(c, A, ("<=",) * len(hypo), -a, lower))
    return out.point[1:]


def check_global_min_lp(f: DCFunction, x_star, tol_opt: float = TOL_OPT) -> OptimalityReport:
    """LP form of the optimality test; no boundedness hypothesis needed.

    ``x*`` is a global minimizer iff for every extreme ``z`` some ``(xi, 0)``
    with ``xi >= 0`` lies in ``hypo + z``. ``a_z`` reports the largest such ``xi``
    (``-inf`` when none exists); descent points come from the dual LP in ``x``.
    """
    x = np.asarray(x_star, dtype=float).ravel()
    cd = global_codifferential(f, x)
    verdicts = []
    for z in hyper_extreme_points(f, x):
        xi = _lp_xi(cd.hypo, z)
        key = SupportPoint.from_array(z)
        if xi >= -tol_opt:
            verdicts.append(ZVerdict(key, xi, np.zeros(f.dim), True, marginal=xi < 0))
            continue
        point = x + _lp_descent_step(cd.hypo, z)
        value = f(point)
        if not value < cd.f_at_base + TOL_DESCENT:
            raise CertificateError(f"LP descent point {point} does not decrease f")
        verdicts.append(ZVerdict(key, xi, np.zeros(f.dim), False, point, value))
    return _report(x, cd.f_at_base, verdicts, "lp")

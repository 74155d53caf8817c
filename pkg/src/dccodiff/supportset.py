"""
Queries on a finite polyhedral convex function given by its affine support set

    f(x) = max_i (a_i + <v_i, x>),    S = conv{(a_i, v_i)}.

Boundedness, infimum, attainment and nonnegativity all reduce to an LP or a
min-norm projection over the vertex list; no slicing of S is ever built.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Polytope, conv_union
from .linprog import LpProblem, LpStatus, solve_lp
from .minnorm import min_norm_point, min_norm_rows

TOL = 1e-8
TOL_LP = 1e-9


def eval_support(S: Polytope, x) -> float:
    """``max_i a_i + <v_i, x>``."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != S.dim:
        raise ValueError(f"point has dimension {x.size}, support set has {S.dim}")
    return float(np.max(S.a + S.v @ x))


def _max_intercept(S: Polytope, v) -> float:
    """``max { sum l_i a_i : sum l_i v_i = v, l in simplex }``, -inf when infeasible."""
    n = len(S)
    A = np.vstack([S.v.T, np.ones((1, n))])
    rhs = np.concatenate([np.asarray(v, dtype=float).ravel(), [1.0]])
    out = solve_lp(LpProblem(S.a, A, ("=",) * A.shape[0], rhs), tol=TOL_LP)
    if out.status is LpStatus.INFEASIBLE:
        return -math.inf
    return float(out.value)


def conjugate_value(S: Polytope, v) -> float:
    """Return ``sup{a : (a, v) in S} = -f*(v)``.

    ``-inf`` means ``v`` lies outside the domain of the conjugate.
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.size != S.dim:
        raise ValueError("slope dimension mismatch")
    return _max_intercept(S, v)


def eps_subdiff_contains(S: Polytope, x, eps: float, v) -> bool:
    """Is ``v`` an eps-subgradient of ``f`` at ``x``?

    Equivalent to some ``(a, v)`` in S with ``a + <v, x> >= f(x) - eps``.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    x = np.asarray(x, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    best = conjugate_value(S, v)
    if best == -math.inf:
        return False
    return best + float(v @ x) >= eval_support(S, x) - eps - TOL_LP


def slope_gap(S: Polytope):
    """Min-norm point of the slope hull ``conv{v_i}``."""
    return min_norm_rows(S.v)


def is_bounded_below(S: Polytope, tol: float = TOL) -> bool:
    """``f`` is bounded below iff the slope hull contains the origin."""
    return slope_gap(S).norm <= tol


def infimum(S: Polytope) -> float:
    """``inf f``, or ``-inf`` when ``f`` is unbounded below."""
    if not is_bounded_below(S):
        return -math.inf
    return _max_intercept(S, np.zeros(S.dim))


def attained_minimizer(S: Polytope):
    """A global minimizer of ``f``, or None when the infimum is not attained.

    Solves the normal-cone system ``<w, v_i> <= a_f - a_i`` for ``w``, picking
    the solution of least l1 norm.
    """
    a_f = infimum(S)
    if a_f == -math.inf:
        raise ValueError("function is unbounded below; no minimizer to look for")
    n, d = len(S), S.dim
    # variables (w, t) with |w_j| <= t_j; minimize sum(t)
    c = np.concatenate([np.zeros(d), -np.ones(d)])
    rows = [np.concatenate([S.v[i], np.zeros(d)]) for i in range(n)]
    rhs = list(a_f - S.a + TOL_LP * (1.0 + abs(a_f)))
    I = np.eye(d)
    for j in range(d):
        rows.append(np.concatenate([I[j], -I[j]]))
        rows.append(np.concatenate([-I[j], -I[j]]))
        rhs += [0.0, 0.0]
    lower = np.concatenate([np.full(d, -np.inf), np.zeros(d)])
    out = solve_lp(LpProblem(c, np.array(rows), ("<=",) * len(rows), rhs, lower), tol=TOL_LP)
    if not out.optimal:
        return None
    return out.point[:d]


class Verdict(enum.Enum):
    ZERO_IN_SET = "ZeroInSet"
    POSITIVE_GAP = "PositiveGap"
    NEGATIVE_WITNESS = "NegativeWitness"
    UNBOUNDED_BELOW = "UnboundedBelow"


@dataclass(frozen=True, eq=False)
class NonnegVerdict:
    """Outcome of a nonnegativity test.

    ``a_star``/``v_star`` is the min-norm point of the set examined. ``x`` and
    ``value`` are set for NEGATIVE_WITNESS, ``direction`` for UNBOUNDED_BELOW
    (the function decreases without bound along ``x - t * direction``).
    """

    kind: Verdict
    a_star: float
    v_star: np.ndarray
    x: np.ndarray | None = None
    value: float | None = None
    direction: np.ndarray | None = None
    marginal: bool = False

    @property
    def nonnegative(self) -> bool:
        return self.kind in (Verdict.ZERO_IN_SET, Verdict.POSITIVE_GAP)


def _classify(S: Polytope, bounded: bool, tol: float) -> NonnegVerdict:
    mn = min_norm_point(S, tol=1e-12)
    a_star, v_star = mn.a, mn.v
    if mn.norm <= tol:
        return NonnegVerdict(Verdict.ZERO_IN_SET, a_star, v_star)
    if a_star < -tol:
        x = v_star / a_star
        value = eval_support(S, x)
        return NonnegVerdict(Verdict.NEGATIVE_WITNESS, a_star, v_star, x=x, value=value)
    if not bounded:
        u = slope_gap(S).point
        return NonnegVerdict(Verdict.UNBOUNDED_BELOW, a_star, v_star, direction=u)
    if a_star > tol:
        return NonnegVerdict(Verdict.POSITIVE_GAP, a_star, v_star)
    return NonnegVerdict(Verdict.ZERO_IN_SET, a_star, v_star, marginal=True)


def nonnegativity_certificate(S: Polytope, tol: float = TOL) -> NonnegVerdict:
    """Decide ``f >= 0`` from the min-norm point ``(a*, v*)`` of S.

    * ``0`` in S: nonnegative.
    * ``a* < 0``: ``f(v*/a*) < 0``, returned as a witness.
    * ``f`` unbounded below: certificate direction from the slope hull.
    * ``a* > 0`` (and bounded below): ``inf f > 0``.
    """
    return _classify(S, is_bounded_below(S), tol)


def _sublevel_ray(S_f: Polytope, S_g: Polytope):
    """LP: ``None`` if ``min f`` over ``{g <= 0}`` is finite (or the set empty).

    Otherwise returns ``u`` with ``f(x - t u) -> -inf`` inside the sublevel set.
    """
    d = S_f.dim
    # variables (t, x) free; minimize t s.t. a_i + v_i x <= t, b_j + w_j x <= 0
    c = np.concatenate([[-1.0], np.zeros(d)])
    rows = [np.concatenate([[-1.0], vi]) for vi in S_f.v]
    rhs = list(-S_f.a)
    rows += [np.concatenate([[0.0], wj]) for wj in S_g.v]
    rhs += list(-S_g.a)
    out = solve_lp(LpProblem(c, np.array(rows), ("<=",) * len(rows), rhs, np.full(d + 1, -np.inf)))
    if out.status is LpStatus.UNBOUNDED:
        return -out.ray[1:]
    return None


def nonneg_on_sublevel(S_f: Polytope, S_g: Polytope, tol: float = TOL) -> NonnegVerdict:
    """Decide ``f >= 0`` on ``{x : g(x) <= 0}`` via the min-norm point of conv(S_f U S_g).

    The converse direction needs ``f`` bounded below on the sublevel set; that is
    checked by LP and reported as UNBOUNDED_BELOW when it fails. A witness ``x``
    satisfies ``f(x) < 0`` and ``g(x) < 0``.
    """
    if S_f.dim != S_g.dim:
        raise ValueError("dimension mismatch")
    U = conv_union([S_f, S_g])
    ray = _sublevel_ray(S_f, S_g)
    out = _classify(U, ray is None, tol)
    if out.kind is Verdict.NEGATIVE_WITNESS:
        fx, gx = eval_support(S_f, out.x), eval_support(S_g, out.x)
        if not (fx < 0 and gx < 0):
            raise ArithmeticError(f"witness failed verification: f={fx}, g={gx}")
        out = NonnegVerdict(out.kind, out.a_star, out.v_star, x=out.x, value=fx)
    if out.kind is Verdict.UNBOUNDED_BELOW:
        out = NonnegVerdict(out.kind, out.a_star, out.v_star, direction=ray)
    return out

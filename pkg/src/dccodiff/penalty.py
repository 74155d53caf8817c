"""
l1 exact penalty for DC problems

    min f0(x)  s.t.  f_i(x) <= 0 (i in I),  f_j(x) = 0 (j in J),

    F_lam(x) = f0(x) + lam * ( sum_i max{0, f_i(x)} + sum_j |f_j(x)| ).

Exactness hypotheses (local error bound, constraint qualifications) are not
verified here. :func:`sublevel_bounded_probe` is a sampling heuristic for the
boundedness of the set C_alpha only.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .dcmodel import Abs, Const, DCFunction, DimensionError, Expr, Max, Scale, Sum, build_dc, expr_dim

TOL_FEAS = 1e-9


@dataclass(frozen=True)
class Problem:
    dim: int
    objective: Expr
    inequalities: tuple[Expr, ...] = ()
    equalities: tuple[Expr, ...] = ()
    ipcq_asserted: bool = False
    ipcq_note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        if self.dim < 1:
            raise DimensionError("dimension must be positive")
        expr_dim(self.objective, self.dim, "objective")
        for k, e in enumerate(self.inequalities):
            expr_dim(e, self.dim, f"inequality[{k}]")
        for k, e in enumerate(self.equalities):
            expr_dim(e, self.dim, f"equality[{k}]")

    def infeasibility(self, x) -> float:
        """The penalty term ``phi(x)``; zero exactly on the feasible set."""
        return (sum(max(0.0, g(x)) for g in self.inequalities)
                + sum(abs(h(x)) for h in self.equalities))

    def is_feasible(self, x, tol: float = TOL_FEAS) -> bool:
        return self.infeasibility(x) <= tol


def penalty_expr(p: Problem, lam: float) -> Expr:
    if lam < 0 or not math.isfinite(lam):
        raise ValueError("penalty parameter must be a finite nonnegative number")
    terms = [Max((Const(0.0), g)) for g in p.inequalities] + [Abs(h) for h in p.equalities]
    if not terms or lam == 0:
        return p.objective
    return Sum((p.objective, Scale(lam, Sum(tuple(terms)))))


def build_penalty(p: Problem, lam: float) -> DCFunction:
    """DC decomposition of ``F_lam``."""
    return build_dc(penalty_expr(p, lam), dim=p.dim)


class ProbeOutcome(enum.Enum):
    LIKELY_BOUNDED = "LikelyBounded"
    UNBOUNDED_EVIDENCE = "UnboundedEvidence"


@dataclass(frozen=True, eq=False)
class ProbeVerdict:
    """HEURISTIC verdict on the boundedness of

        C_alpha = {x : f0 < f* + alpha, f_i < alpha, |f_j| < alpha}.

    ``point`` is a member of C_alpha found on or outside the box.
    """

    outcome: ProbeOutcome
    f_star: float
    alpha: float
    point: np.ndarray | None = None
    penalty_bounded_below: bool | None = None
    heuristic: bool = field(default=True)


def grid_feasible_minimum(p: Problem, box, per_axis: int = 41) -> tuple[float, np.ndarray | None]:
    """Smallest objective value over feasible points of a regular grid (d <= 3)."""
    lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), (p.dim,)) for b in box)
    if p.dim > 3:
        raise ValueError("grid scan is limited to dimension <= 3; pass f_star explicitly")
    axes = [np.linspace(lo[k], hi[k], per_axis) for k in range(p.dim)]
    best, arg = math.inf, None
    for pt in itertools.product(*axes):
        x = np.array(pt)
        if p.is_feasible(x):
            val = p.objective(x)
            if val < best:
                best, arg = val, x
    return best, arg


def in_c_alpha(p: Problem, x, f_star: float, alpha: float) -> bool:
    return (p.objective(x) < f_star + alpha
            and all(g(x) < alpha for g in p.inequalities)
            and all(abs(h(x)) < alpha for h in p.equalities))


def sublevel_bounded_probe(
    p: Problem,
    lam: float,
    alpha: float,
    box,
    samples: int = 2000,
    f_star: float | None = None,
    seed: int = 0,
) -> ProbeVerdict:
    """Look for members of C_alpha on the boundary of ``box`` and beyond.

    ``box`` is a pair ``(lo, hi)`` of scalars or vectors. Without ``f_star`` the
    optimal value is estimated by a feasible grid scan of the box. Points are
    drawn on rays from the box centre, placed on the boundary and at 2, 10 and
    100 times that distance. Finding none is evidence, not proof.
    """
    from .optimality import bounded_below_codiff

    if alpha <= 0:
        raise ValueError("alpha must be positive")
    lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), (p.dim,)) for b in box)
    if f_star is None:
        f_star, _ = grid_feasible_minimum(p, (lo, hi))
        if f_star == math.inf:
            raise ValueError("no feasible grid point in the box; pass f_star explicitly")
    F = build_penalty(p, lam)
    centre = 0.5 * (lo + hi)
    bounded = bounded_below_codiff(F, centre)

    rng = np.random.default_rng(seed)
    half = 0.5 * (hi - lo)
    for _ in range(samples):
        u = rng.normal(size=p.dim)
        # scale the ray so it exits the box exactly
        with np.errstate(divide="ignore"):
            t = np.min(np.where(u != 0, half / np.abs(u), np.inf))
        for factor in (1.0, 2.0, 10.0, 100.0):
            x = centre + factor * t * u
            if in_c_alpha(p, x, f_star, alpha):
                return ProbeVerdict(ProbeOutcome.UNBOUNDED_EVIDENCE, f_star, alpha, x, bounded)
    return ProbeVerdict(ProbeOutcome.LIKELY_BOUNDED, f_star, alpha, None, bounded)

"""
Dense two-phase primal simplex with Bland's rule.

Small LPs only (a few hundred variables). Problems are posed as maximization:

    maximize    c @ x
    subject to  A[i] @ x  (<= | = | >=)  b[i]
                x[j] >= lower[j]        (lower[j] may be -inf)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TOL_LP = 1e-9
PIVOT_TOL = 1e-11

_RELATIONS = ("<=", "=", ">=")


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Maximize ``objective @ x`` under row relations and per-variable lower bounds.

    ``lower`` defaults to zeros; use ``-np.inf`` for free variables.
    """

    objective: np.ndarray
    A: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, c.size)
        b = np.asarray(self.rhs, dtype=float).ravel()
        rel = tuple(self.relations)
        lower = np.zeros(c.size) if self.lower is None else np.asarray(self.lower, dtype=float).ravel()
        if A.ndim != 2 or A.shape[1] != c.size:
            raise ValueError(f"constraint matrix shape {A.shape} does not match {c.size} variables")
        if b.size != A.shape[0] or len(rel) != A.shape[0]:
            raise ValueError("rhs and relations must have one entry per constraint row")
        if lower.size != c.size:
            raise ValueError("lower bounds must have one entry per variable")
        bad = [r for r in rel if r not in _RELATIONS]
        if bad:
            raise ValueError(f"unknown relation(s) {bad}; expected one of {_RELATIONS}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("LP data must be finite")
        if np.any(np.isnan(lower)) or np.any(lower == np.inf):
            raise ValueError("lower bounds must be finite or -inf")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "relations", rel)
        object.__setattr__(self, "lower", lower)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def violation(self, x) -> float:
        """Largest constraint or bound violation at ``x`` (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        r = self.A @ x - self.rhs
        worst = 0.0
        for ri, rel in zip(r, self.relations):
            if rel == "<=":
                worst = max(worst, ri)
            elif rel == ">=":
                worst = max(worst, -ri)
            else:
                worst = max(worst, abs(ri))
        finite = np.isfinite(self.lower)
        if np.any(finite):
            worst = max(worst, float(np.max(self.lower[finite] - x[finite], initial=0.0)))
        return float(worst)


@dataclass(frozen=True, eq=False)
class LpOutcome:
    status: LpStatus
    point: np.ndarray | None = None
    value: float | None = None
    # improving feasible direction, for UNBOUNDED outcomes
    ray: np.ndarray | None = None
    iterations: int = 0
    phase1_value: float = field(default=0.0)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Row-reduced tableau. Last row is the objective row, last column the rhs."""

    def __init__(self, T: np.ndarray, basis: list[int], tol: float, max_iter: int):
        self.T = T
        self.basis = basis
        self.tol = tol
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, r: int, j: int):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j

    def run(self, n_cols: int):
        """Iterate until optimal; returns the entering column index if unbounded, else None."""
        T = self.T
        m = T.shape[0] - 1
        while True:
            z = T[-1, :n_cols]
            candidates = np.flatnonzero(z < -self.tol)
            if candidates.size == 0:
                return None
            j = int(candidates[0])  # Bland: lowest index
            col = T[:m, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return j
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            self.iterations += 1
            if self.iterations > self.max_iter:
                raise RuntimeError(f"simplex exceeded {self.max_iter} iterations")


def solve_lp(p: LpProblem, tol: float = TOL_LP) -> LpOutcome:
    """Solve ``p`` by the two-phase simplex method.

    Bland's rule is used throughout, so the method cannot cycle. Infeasibility is
    declared when the phase-1 optimum (negated sum of artificials) is below
    ``-tol * (1 + max|b|)``.
    """
    c, A, b, lower = p.objective, p.A, p.rhs, p.lower
    m, n = A.shape

    # substitute x_j = lower_j + y_j, or x_j = y+ - y- for free variables
    free = ~np.isfinite(lower)
    shift = np.where(free, 0.0, lower)
    b = b - A @ shift
    cols = []  # (original var, sign)
    for j in range(n):
        cols.append((j, 1.0))
        if free[j]:
            cols.append((j, -1.0))
    nv = len(cols)
    M = np.empty((m, nv))
    cy = np.empty(nv)
    for k, (j, s) in enumerate(cols):
        M[:, k] = s * A[:, j]
        cy[k] = s * c[j]

    rel = list(p.relations)
    flip = b < 0
    M[flip] *= -1.0
    b = np.abs(b)
    for i in np.flatnonzero(flip):
        rel[i] = {"<=": ">=", ">=": "<=", "=": "="}[rel[i]]

    n_slack = sum(r != "=" for r in rel)
    n_art = sum(r != "<=" for r in rel)
    n_total = nv + n_slack + n_art
    T = np.zeros((m + 1, n_total + 1))
    T[:m, :nv] = M
    T[:m, -1] = b
    basis = [0] * m
    s_col, a_col = nv, nv + n_slack
    art_cols = []
    for i, r in enumerate(rel):
        if r == "<=":
            T[i, s_col] = 1.0
            basis[i] = s_col
            s_col += 1
        else:
            if r == ">=":
                T[i, s_col] = -1.0
                s_col += 1
            T[i, a_col] = 1.0
            basis[i] = a_col
            art_cols.append(a_col)
            a_col += 1

    max_iter = 10 * (m + n_total) ** 2 + 100
    tab = _Tableau(T, basis, tol, max_iter)

    phase1_value = 0.0
    if art_cols:
        # maximize -sum(artificials)
        T[-1, :] = 0.0
        T[-1, art_cols] = 1.0
        for i in range(m):
            if basis[i] >= nv + n_slack:
                T[-1] -= T[i]
        tab.run(n_total)
        phase1_value = float(T[-1, -1])
        scale = 1.0 + (float(np.max(np.abs(p.rhs))) if m else 0.0)
        if phase1_value < -tol * scale:
            return LpOutcome(LpStatus.INFEASIBLE, iterations=tab.iterations, phase1_value=phase1_value)
        # drive zero-level artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if basis[i] >= nv + n_slack:
                row = T[i, : nv + n_slack]
                nz = np.flatnonzero(np.abs(row) > 1e-9)
                if nz.size:
                    tab.pivot(i, int(nz[0]))
                    keep.append(i)
            else:
                keep.append(i)
        T = np.vstack([T[keep], T[-1:]])
        T = np.delete(T, np.arange(nv + n_slack, n_total), axis=1)
        basis = [basis[i] for i in keep]
        tab.T, tab.basis = T, basis
        n_total = nv + n_slack
        m = len(keep)

    T[-1, :] = 0.0
    T[-1, :nv] = -cy
    for i in range(m):
        T[-1] -= T[-1, basis[i]] * T[i]
    entering = tab.run(n_total)

    def to_x(y):
        x = shift.copy()
        for k, (j, s) in enumerate(cols):
            x[j] += s * y[k]
        return x

    y = np.zeros(n_total)
    for i in range(m):
        y[basis[i]] = max(T[i, -1], 0.0)
    if entering is not None:
        d = np.zeros(n_total)
        d[entering] = 1.0
        for i in range(m):
            d[basis[i]] = -T[i, entering]
        ray = to_x(d) - shift
        return LpOutcome(LpStatus.UNBOUNDED, point=to_x(y[:nv]), ray=ray, iterations=tab.iterations,
                         phase1_value=phase1_value)
    x = to_x(y[:nv])
    return LpOutcome(LpStatus.OPTIMAL, point=x, value=float(c @ x), iterations=tab.iterations,
                     phase1_value=phase1_value)

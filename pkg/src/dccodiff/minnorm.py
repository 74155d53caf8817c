"""
Minimum-norm point of the convex hull of finitely many points (Wolfe's method).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Polytope

TOL_STOP = 1e-10
RIDGE = 1e-12
_WEIGHT_EPS = 1e-14


@dataclass(frozen=True, eq=False)
class MinNormResult:
    """Projection of the origin onto a polytope.

    ``weights`` are convex-combination coefficients over the input vertices,
    so ``weights @ vertices`` reproduces ``point``.
    """

    point: np.ndarray
    weights: np.ndarray
    norm: float
    iterations: int = 0

    @property
    def a(self) -> float:
        return float(self.point[0])

    @property
    def v(self) -> np.ndarray:
        return self.point[1:]


def _affine_minimizer(Q: np.ndarray) -> np.ndarray:
    """Coefficients ``mu`` (summing to 1) of the min-norm point of aff(Q rows)."""
    k = Q.shape[0]
    if k == 1:
        return np.ones(1)
    # KKT system of  min ||mu @ Q||^2  s.t.  sum(mu) = 1
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = Q @ Q.T
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(K, rhs)
        if not np.all(np.isfinite(sol)) or np.linalg.cond(K) > 1e12:
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        K[:k, :k] += RIDGE * np.eye(k)
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    mu = sol[:k]
    return mu / mu.sum()


def min_norm_rows(V: np.ndarray, tol: float = TOL_STOP, max_iter: int | None = None) -> MinNormResult:
    """Wolfe's algorithm on the rows of ``V``.

    Stops once ``max_q <p, p - q> <= tol * (1 + |p|^2)`` over all rows ``q``.
    """
    V = np.asarray(V, dtype=float)
    n = V.shape[0]
    if n == 0:
        raise ValueError("min-norm point of an empty set")
    if max_iter is None:
        max_iter = 50 * n + 100

    j0 = int(np.argmin(np.einsum("ij,ij->i", V, V)))
    S = [j0]
    lam = np.ones(1)
    x = V[j0].copy()
    it = 0
    while it < max_iter:
        it += 1
        # major cycle: most violating vertex
        dots = V @ x
        j = int(np.argmin(dots))
        xx = float(x @ x)
        if xx - dots[j] <= tol * (1.0 + xx) or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        # minor cycles: move toward the affine minimizer while staying in the simplex
        while True:
            it += 1
            mu = _affine_minimizer(V[S])
            if np.all(mu > _WEIGHT_EPS):
                lam = mu
                break
            neg = mu <= _WEIGHT_EPS
            denom = lam[neg] - mu[neg]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, lam[neg] / denom, np.inf)
            theta = float(min(1.0, np.min(ratios)))
            lam = (1.0 - theta) * lam + theta * mu
            lam[lam < _WEIGHT_EPS] = 0.0
            keep = lam > 0
            if not keep.any():
                keep[int(np.argmax(mu))] = True
                lam = keep.astype(float)
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep]
            lam /= lam.sum()
            if it > max_iter:
                break
        x = lam @ V[S]

    weights = np.zeros(n)
    weights[S] = lam
    point = weights @ V
    return MinNormResult(point=point, weights=weights, norm=float(np.linalg.norm(point)), iterations=it)


def min_norm_point(P: Polytope, tol: float = TOL_STOP) -> MinNormResult:
    """Euclidean projection of the origin onto ``conv P``, with convex weights."""
    return min_norm_rows(P.vertices, tol=tol)

"""
Vertex-representation polytopes in R^{1+d}.

A row ``(a, v_1, ..., v_d)`` stands for the affine function ``x -> a + <v, x>``.
Every set handled by the library (affine support sets, hypodifferentials,
hyperdifferentials) is the convex hull of finitely many such rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .linprog import LpProblem, solve_lp

TOL_DEDUP = 1e-9
TOL_PRUNE = 1e-9
# vertex count above which results are pruned to extreme points automatically
PRUNE_THRESHOLD = 64


class SupportPoint(NamedTuple):
    """The affine function ``x -> a + <v, x>`` as a point ``(a, v)``."""

    a: float
    v: tuple[float, ...]

    @classmethod
    def from_array(cls, row) -> "SupportPoint":
        row = np.asarray(row, dtype=float).ravel()
        return cls(float(row[0]), tuple(float(t) for t in row[1:]))

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.a], np.asarray(self.v, dtype=float)])


def as_row(p, dim: int | None = None) -> np.ndarray:
    """Coerce a SupportPoint or array-like ``(a, v...)`` into a flat float array."""
    if isinstance(p, SupportPoint):
        row = p.as_array()
    else:
        row = np.asarray(p, dtype=float).ravel()
    if dim is not None and row.size != dim + 1:
        raise ValueError(f"expected a point of length {dim + 1}, got {row.size}")
    return row


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of the rows of ``vertices`` (shape ``(n, 1 + dim)``).

    The vertex array is stored read-only. Rows are candidates; they need not be
    extreme points unless the polytope came out of :func:`prune_to_extreme`.
    """

    vertices: np.ndarray

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float, copy=True)
        if V.ndim == 1:
            V = V.reshape(1, -1)
        if V.ndim != 2 or V.shape[0] == 0:
            raise ValueError("a polytope needs a non-empty 2-D vertex array")
        if V.shape[1] < 2:
            raise ValueError("vertices must have at least one slope coordinate (dim >= 1)")
        if not np.all(np.isfinite(V)):
            raise ValueError("vertex coordinates must be finite")
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)

    @classmethod
    def from_points(cls, points: Iterable) -> "Polytope":
        return cls(np.array([as_row(p) for p in points]))

    @classmethod
    def singleton(cls, point) -> "Polytope":
        return cls(as_row(point).reshape(1, -1))

    @classmethod
    def origin(cls, dim: int) -> "Polytope":
        return cls(np.zeros((1, dim + 1)))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1] - 1

    @property
    def a(self) -> np.ndarray:
        return self.vertices[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.vertices[:, 1:]

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def points(self) -> list[SupportPoint]:
        return [SupportPoint.from_array(r) for r in self.vertices]

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, n={len(self)})"


def _check_dims(*polys: Polytope) -> int:
    dims = {p.dim for p in polys}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def dedup(V: np.ndarray, tol: float = TOL_DEDUP) -> np.ndarray:
    """Drop rows lying within ``tol`` (Euclidean) of an earlier row."""
    V = np.asarray(V, dtype=float)
    if V.shape[0] <= 1:
        return V
    order = np.lexsort(V.T[::-1])
    V = V[order]
    keep = [0]
    for i in range(1, V.shape[0]):
        # rows are sorted on the first coordinate, so only a window needs checking
        kept = V[keep]
        near = np.abs(kept[:, 0] - V[i, 0]) <= tol
        if near.any() and np.min(np.linalg.norm(kept[near] - V[i], axis=1)) <= tol:
            continue
        keep.append(i)
    return V[keep]


def _maybe_prune(V: np.ndarray, prune: bool | None) -> Polytope:
    V = dedup(V)
    P = Polytope(V)
    if prune or (prune is None and len(P) > PRUNE_THRESHOLD):
        P = prune_to_extreme(P)
    return P


def minkowski_sum(P: Polytope, Q: Polytope, prune: bool | None = None) -> Polytope:
    """Pairwise vertex sums ``{p + q}``; their hull is ``conv P + conv Q``."""
    _check_dims(P, Q)
    V = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.dim + 1)
    return _maybe_prune(V, prune)


def minkowski_sum_all(parts: Sequence[Polytope], dim: int, prune: bool | None = None) -> Polytope:
    """Minkowski sum of any number of polytopes (origin for an empty list)."""
    out = Polytope.origin(dim)
    for p in parts:
        out = minkowski_sum(out, p, prune=prune)
    return out


def conv_union(parts: Sequence[Polytope], prune: bool | None = None) -> Polytope:
    """Convex hull of the union of ``parts``."""
    if not parts:
        raise ValueError("conv_union needs at least one polytope")
    _check_dims(*parts)
    return _maybe_prune(np.vstack([p.vertices for p in parts]), prune)


def scale(P: Polytope, k: float) -> Polytope:
    k = float(k)
    if not np.isfinite(k):
        raise ValueError("scale factor must be finite")
    return Polytope(dedup(P.vertices * k))


def translate(P: Polytope, t) -> Polytope:
    return Polytope(P.vertices + as_row(t, P.dim))


def support_value(P: Polytope, direction) -> float:
    """Support function ``max_i <p_i, direction>`` in R^{1+d}."""
    return float(np.max(P.vertices @ as_row(direction, P.dim)))


def in_hull(point, V: np.ndarray, tol: float = TOL_PRUNE) -> bool:
    """LP test: is ``point`` a convex combination of the rows of ``V``?"""
    V = np.asarray(V, dtype=float)
    point = np.asarray(point, dtype=float)
    n = V.shape[0]
    A = np.vstack([V.T, np.ones((1, n))])
    rhs = np.concatenate([point, [1.0]])
    out = solve_lp(LpProblem(np.zeros(n), A, ("=",) * A.shape[0], rhs), tol=tol)
    return out.optimal


def prune_to_extreme(P: Polytope, tol: float = TOL_PRUNE) -> Polytope:
    """Keep only the extreme points of ``conv P``.

    Each vertex is tested against the hull of the vertices still kept; removing a
    non-extreme point never changes the hull, so one sweep suffices.
    """
    V = dedup(P.vertices)
    keep = list(range(V.shape[0]))
    for i in range(V.shape[0]):
        if len(keep) == 1:
            break
        others = [j for j in keep if j != i]
        if in_hull(V[i], V[others], tol=tol):
            keep = others
    return Polytope(V[keep])

"""
Piecewise-affine DC functions built from expression trees.

An expression is turned once into a pair of affine support sets
``(S_plus, S_minus)`` with ``f = max over S_plus - max over S_minus``. The
global codifferential at any point is then a vertex-wise shift of that pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import geometry as geo
from .geometry import Polytope
from .supportset import eval_support

TOL_NORMALIZE = 1e-8


class DimensionError(ValueError):
    """Affine leaves of an expression disagree on the dimension."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{message} at {path or '<root>'}")
        self.path = path


class Expr:
    """Base class of expression nodes. Calling a node evaluates it directly."""

    def __call__(self, x) -> float:
        raise NotImplementedError

    def children(self) -> tuple["Expr", ...]:
        return ()


def _floats(seq) -> tuple[float, ...]:
    return tuple(float(t) for t in np.asarray(seq, dtype=float).ravel())


def _exprs(seq) -> tuple[Expr, ...]:
    items = tuple(seq)
    for it in items:
        if not isinstance(it, Expr):
            raise TypeError(f"expected an expression node, got {type(it).__name__}")
    return items


@dataclass(frozen=True)
class Const(Expr):
    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))

    def __call__(self, x) -> float:
        return self.c


@dataclass(frozen=True)
class Affine(Expr):
    """``x -> a + <v, x>``."""

    a: float
    v: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "v", _floats(self.v))
        if not self.v:
            raise DimensionError("affine leaf with empty slope")

    def __call__(self, x) -> float:
        return self.a + float(np.dot(self.v, np.asarray(x, dtype=float).ravel()))


@dataclass(frozen=True)
class Abs(Expr):
    child: Expr

    def __call__(self, x) -> float:
        return abs(self.child(x))

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr

    def __call__(self, x) -> float:
        return -self.child(x)

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Scale(Expr):
    k: float
    child: Expr

    def __post_init__(self):
        object.__setattr__(self, "k", float(self.k))

    def __call__(self, x) -> float:
        return self.k * self.child(x)

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", _exprs(self.terms))
        if not self.terms:
            raise ValueError("sum needs at least one term")

    def __call__(self, x) -> float:
        return sum(t(x) for t in self.terms)

    def children(self):
        return self.terms


@dataclass(frozen=True)
class Max(Expr):
    terms: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", _exprs(self.terms))
        if not self.terms:
            raise ValueError("max needs at least one term")

    def __call__(self, x) -> float:
        return max(t(x) for t in self.terms)

    def children(self):
        return self.terms


@dataclass(frozen=True)
class Min(Expr):
    terms: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", _exprs(self.terms))
        if not self.terms:
            raise ValueError("min needs at least one term")

    def __call__(self, x) -> float:
        return min(t(x) for t in self.terms)

    def children(self):
        return self.terms


def expr_dim(e: Expr, dim: int | None = None, path: str = "") -> int | None:
    """Common slope dimension of the affine leaves (None if there are none).

    Raises DimensionError naming the offending node path on a mismatch.
    """
    if isinstance(e, Affine):
        if dim is not None and len(e.v) != dim:
            raise DimensionError(f"affine leaf has dimension {len(e.v)}, expected {dim}", path or "<root>")
        return len(e.v)
    for i, ch in enumerate(e.children()):
        dim = expr_dim(ch, dim, f"{path}/{type(e).__name__.lower()}[{i}]")
    return dim


@dataclass(frozen=True, eq=False)
class DCFunction:
    """``f = f1 - f2`` with ``f1 = max over plus``, ``f2 = max over minus``."""

    dim: int
    plus: Polytope
    minus: Polytope
    source: Expr | None = None

    def __post_init__(self):
        if self.plus.dim != self.dim or self.minus.dim != self.dim:
            raise DimensionError("support sets do not match the declared dimension")

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def components(self, x) -> tuple[float, float]:
        return eval_support(self.plus, x), eval_support(self.minus, x)

    def negated(self) -> "DCFunction":
        src = Neg(self.source) if self.source is not None else None
        return DCFunction(self.dim, self.minus, self.plus, src)


@dataclass(frozen=True, eq=False)
class CodiffPair:
    """Global codifferential ``[hypo, hyper]`` of ``f`` at ``base_point``.

    For every ``dx``:  ``f(x + dx) - f(x) = max_hypo(a + <v, dx>) + min_hyper(b + <w, dx>)``.
    """

    hypo: Polytope
    hyper: Polytope
    base_point: np.ndarray
    f_at_base: float

    def increment(self, dx) -> float:
        """Right-hand side of the increment identity at ``dx``."""
        dx = np.asarray(dx, dtype=float).ravel()
        up = np.max(self.hypo.a + self.hypo.v @ dx)
        down = np.min(self.hyper.a + self.hyper.v @ dx)
        return float(up + down)


def _normalize(plus: Polytope, minus: Polytope) -> tuple[Polytope, Polytope]:
    # an affine f2 is folded into f1, keeping f2 = 0 for convex pieces
    if len(minus) == 1 and np.any(np.abs(minus.vertices[0]) > 0):
        return geo.translate(plus, -minus.vertices[0]), Polytope.origin(minus.dim)
    return plus, minus


def _max_rule(parts: Sequence[tuple[Polytope, Polytope]], d: int, prune) -> tuple[Polytope, Polytope]:
    minus_all = [m for _, m in parts]
    branches = []
    for i, (p, _) in enumerate(parts):
        others = geo.minkowski_sum_all(minus_all[:i] + minus_all[i + 1:], d, prune=prune)
        branches.append(geo.minkowski_sum(p, others, prune=prune))
    return geo.conv_union(branches, prune=prune), geo.minkowski_sum_all(minus_all, d, prune=prune)


def _build(e: Expr, d: int, prune) -> tuple[Polytope, Polytope]:
    zero = Polytope.origin(d)
    match e:
        case Const(c=c):
            out = Polytope.singleton(np.concatenate([[c], np.zeros(d)])), zero
        case Affine(a=a, v=v):
            out = Polytope.singleton(np.concatenate([[a], v])), zero
        case Neg(child=ch):
            p, m = _build(ch, d, prune)
            out = m, p
        case Scale(k=k, child=ch):
            p, m = _build(ch, d, prune)
            if k >= 0:
                out = geo.scale(p, k), geo.scale(m, k)
            else:
                out = geo.scale(m, -k), geo.scale(p, -k)
        case Sum(terms=ts):
            parts = [_build(t, d, prune) for t in ts]
            out = (geo.minkowski_sum_all([p for p, _ in parts], d, prune=prune),
                   geo.minkowski_sum_all([m for _, m in parts], d, prune=prune))
        case Max(terms=ts):
            out = _max_rule([_build(t, d, prune) for t in ts], d, prune)
        case Min(terms=ts):
            # min_i f_i = -max_i(-f_i)
            parts = [_build(t, d, prune) for t in ts]
            mp, mm = _max_rule([(m, p) for p, m in parts], d, prune)
            out = mm, mp
        case Abs(child=ch):
            p, m = _build(ch, d, prune)
            p, m = _normalize(p, m)
            out = _max_rule([(p, m), _normalize(m, p)], d, prune)
        case _:
            raise TypeError(f"unknown expression node {type(e).__name__}")
    return _normalize(*out)


def build_dc(e: Expr, dim: int | None = None, prune: bool | None = None) -> DCFunction:
    """DC decomposition of ``e`` at the support-set level.

    Sums become Minkowski sums, negative scaling swaps the components, and
    ``max_i (p_i - q_i) = max_i (p_i + sum_{j != i} q_j) - sum_i q_i``; ``min``
    is the dual rule and ``|l| = max(l, -l)``. Whenever the concave part is a
    single affine function it is folded into the convex part.
    """
    d = expr_dim(e, dim)
    if d is None:
        if dim is None:
            raise DimensionError("expression has no affine leaf; pass dim explicitly")
        d = dim
    plus, minus = _build(e, d, prune)
    return DCFunction(d, plus, minus, e)


def evaluate(f: DCFunction, x) -> float:
    f1, f2 = f.components(x)
    return f1 - f2


def global_codifferential(f: DCFunction, x) -> CodiffPair:
    """Shift the support sets to ``x``.

    ``hypo = {(a - f1(x) + <v, x>, v)}`` over ``S_plus`` and
    ``hyper = {(-b + f2(x) - <w, x>, -w)}`` over ``S_minus``.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size != f.dim:
        raise DimensionError(f"point has dimension {x.size}, function has {f.dim}")
    f1, f2 = f.components(x)
    P, M = f.plus.vertices, f.minus.vertices
    # + 0.0 clears negative zeros
    hypo = np.column_stack([P[:, 0] - f1 + P[:, 1:] @ x, P[:, 1:]]) + 0.0
    hyper = np.column_stack([-M[:, 0] + f2 - M[:, 1:] @ x, -M[:, 1:]]) + 0.0
    return CodiffPair(Polytope(hypo), Polytope(hyper), x.copy(), f1 - f2)


def canonical_order(V: np.ndarray) -> np.ndarray:
    """Lexicographic row order (first coordinate most significant)."""
    V = np.asarray(V)
    return V[np.lexsort(V.T[::-1])]


def hyper_extreme_points(f: DCFunction, x) -> np.ndarray:
    """Extreme points of the hyperdifferential at ``x``, as rows in canonical order."""
    hyper = global_codifferential(f, x).hyper
    return canonical_order(geo.prune_to_extreme(hyper).vertices)

"""
Codifferential descent for piecewise-affine DC functions.

Each iteration computes the global codifferential at ``x_n``. For every extreme
point ``z`` of the hyperdifferential (optionally only those with ``b <= mu``)
it takes the min-norm point ``(a, v)`` of ``hypo + z`` and line-searches
``f(x_n - alpha v)`` exactly over ``[0, alpha_star]``. The best ``z`` wins.
Because every ``z`` is tried, the method can leave local minimizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .dcmodel import DCFunction, global_codifferential, hyper_extreme_points
from .geometry import SupportPoint
from .minnorm import min_norm_point
from .optimality import OptimalityReport, UnboundedError, bounded_below_witness, check_global_min


@dataclass(frozen=True)
class McdParams:
    alpha_star: float
    max_iters: int = 1000
    stop_tol: float = 1e-10
    mu: float = math.inf

    def __post_init__(self):
        if not self.alpha_star > 0 or not math.isfinite(self.alpha_star):
            raise ValueError("alpha_star must be a positive finite number")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.stop_tol < 0:
            raise ValueError("stop_tol must be nonnegative")
        if not self.mu > 0:
            raise ValueError("mu must be positive (or inf)")


@dataclass(frozen=True, eq=False)
class McdStep:
    """One accepted step: ``x_next = x - alpha * v``."""

    x: np.ndarray
    value: float
    z: SupportPoint
    v: np.ndarray
    alpha: float


@dataclass(eq=False)
class McdTrace:
    iterates: list[McdStep] = field(default_factory=list)
    x_final: np.ndarray | None = None
    f_final: float | None = None
    reason: str = ""
    verdict: OptimalityReport | None = None

    @property
    def values(self) -> list[float]:
        return [s.value for s in self.iterates] + ([self.f_final] if self.f_final is not None else [])


def _crossings(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    # pieces c_i + s_i * alpha; alpha where two of them meet
    dc = c[:, None] - c[None, :]
    ds = s[None, :] - s[:, None]
    iu = np.triu_indices(len(c), k=1)
    dc, ds = dc[iu], ds[iu]
    ok = np.abs(ds) > 1e-15
    return dc[ok] / ds[ok]


def line_search_exact(f: DCFunction, x, w, alpha_star: float) -> tuple[float, float]:
    """Global minimum of ``g(alpha) = f(x - alpha w)`` over ``[0, alpha_star]``.

    ``g`` is piecewise affine with kinks only where two pieces of ``f1`` or two
    pieces of ``f2`` cross, so checking those points and the two ends suffices.
    Ties go to the smallest ``alpha``.
    """
    if not alpha_star > 0:
        raise ValueError("alpha_star must be positive")
    x = np.asarray(x, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    cand = [np.array([0.0, alpha_star])]
    for S in (f.plus, f.minus):
        cand.append(_crossings(S.a + S.v @ x, -(S.v @ w)))
    alphas = np.unique(np.clip(np.concatenate(cand), 0.0, alpha_star))
    values = np.array([f(x - t * w) for t in alphas])
    k = int(np.argmin(values))
    # prefer the smallest alpha among near-ties
    k = int(np.flatnonzero(values <= values[k] + 1e-12 * (1.0 + abs(values[k])))[0])
    return float(alphas[k]), float(values[k])


def filtered_extreme_points(f: DCFunction, x, mu: float = math.inf) -> np.ndarray:
    """Hyperdifferential extreme points ``(b, w)`` with ``b <= mu``, canonical order."""
    Z = hyper_extreme_points(f, x)
    if math.isinf(mu):
        return Z
    return Z[Z[:, 0] <= mu]


def mcd_run(f: DCFunction, x0, params: McdParams) -> McdTrace:
    """Run codifferential descent from ``x0``.

    Raises UnboundedError (with a direction certificate) if ``f`` is not
    bounded below. Stops when the best decrease is below ``stop_tol`` or after
    ``max_iters`` steps; the final point then gets a global optimality check.
    """
    x = np.asarray(x0, dtype=float).ravel().copy()
    ok, direction = bounded_below_witness(f, x)
    if not ok:
        raise UnboundedError("function is unbounded below", direction)

    trace = McdTrace()
    fx = f(x)
    reason = "max_iters"
    for _ in range(params.max_iters):
        cd = global_codifferential(f, x)
        best = None
        for z in filtered_extreme_points(f, x, params.mu):
            v = min_norm_point(geo.translate(cd.hypo, z)).v
            if not np.any(v):
                continue
            alpha, val = line_search_exact(f, x, v, params.alpha_star)
            if best is None or val < best[0]:
                best = (val, z, v, alpha)
        if best is None or fx - best[0] < params.stop_tol:
            reason = "stalled"
            break
        val, z, v, alpha = best
        trace.iterates.append(McdStep(x.copy(), fx, SupportPoint.from_array(z), v.copy(), alpha))
        x = x - alpha * v
        fx = f(x)
    trace.x_final, trace.f_final, trace.reason = x, fx, reason
    trace.verdict = check_global_min(f, x, check_bounded=False)
    return trace

import numpy as np
import pytest

from dccodiff.linprog import LpProblem, LpStatus, solve_lp
from oracles import lp_vertex_enum


def test_single_bound():
    out = solve_lp(LpProblem([1.0], [[1.0]], ("<=",), [3.0]))
    assert out.status is LpStatus.OPTIMAL
    assert out.value == pytest.approx(3.0)


def test_infeasible():
    out = solve_lp(LpProblem([0.0], [[1.0]], ("<=",), [-1.0]))
    assert out.status is LpStatus.INFEASIBLE


def test_unbounded_ray():
    # max x + y s.t. x - y <= 1
    out = solve_lp(LpProblem([1.0, 1.0], [[1.0, -1.0]], ("<=",), [1.0]))
    assert out.status is LpStatus.UNBOUNDED
    r = out.ray
    assert np.all(r >= -1e-12) and r[0] - r[1] <= 1e-12 and r.sum() > 0


def test_equality_and_free_variables():
    # max -|x - 2| written with a free x: max -t, t >= x - 2, t >= 2 - x
    p = LpProblem([0.0, -1.0], [[1.0, -1.0], [-1.0, -1.0]], ("<=", "<="), [2.0, -2.0],
                  lower=[-np.inf, -np.inf])
    out = solve_lp(p)
    assert out.optimal and out.value == pytest.approx(0.0, abs=1e-12)
    assert out.point[0] == pytest.approx(2.0)
    out = solve_lp(LpProblem([1.0, 2.0], [[1.0, 1.0], [1.0, 0.0]], ("=", ">="), [4.0, 1.0]))
    assert out.optimal and out.value == pytest.approx(7.0)


def test_disk_polygon_infimum():
    n = 256
    th = 2 * np.pi * np.arange(n) / n
    a, v = -1 + np.cos(th), 1 + np.sin(th)
    A = np.vstack([v, np.ones(n)])
    out = solve_lp(LpProblem(a, A, ("=", "="), [0.0, 1.0]))
    assert out.optimal and out.value == pytest.approx(-1.0, abs=1e-3)


def test_against_vertex_enumeration(rng):
    for _ in range(150):
        m, n = rng.integers(1, 5), rng.integers(1, 4)
        A = rng.normal(size=(m, n))
        b = rng.uniform(-1, 3, size=m)
        # box row keeps the problem bounded
        A = np.vstack([A, np.ones((1, n))])
        b = np.append(b, 5.0)
        c = rng.normal(size=n)
        ref, _ = lp_vertex_enum(c, A, b)
        out = solve_lp(LpProblem(c, A, ("<=",) * len(b), b))
        if ref is None:
            assert out.status is LpStatus.INFEASIBLE
        else:
            assert out.optimal
            assert out.value == pytest.approx(ref, abs=1e-7)
            assert out.iterations <= 10 * (A.shape[0] + A.shape[1]) ** 2 + 100


def test_duality_gap(rng):
    # primal max c.x, Ax <= b, x >= 0; dual min b.y, A^T y >= c, y >= 0
    for _ in range(100):
        m, n = 3, 3
        A = rng.uniform(0.1, 2.0, size=(m, n))
        b = rng.uniform(1, 4, size=m)
        c = rng.normal(size=n)
        primal = solve_lp(LpProblem(c, A, ("<=",) * m, b))
        dual = solve_lp(LpProblem(-b, A.T, (">=",) * n, c))
        assert primal.optimal and dual.optimal
        assert primal.value == pytest.approx(-dual.value, abs=1e-7)


def test_degenerate_problem_terminates():
    # classic cycling example (Beale); Bland's rule must terminate
    c = [0.75, -150.0, 0.02, -6.0]
    A = [[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]]
    out = solve_lp(LpProblem(c, A, ("<=",) * 3, [0.0, 0.0, 1.0]))
    assert out.optimal and out.value == pytest.approx(0.05)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        LpProblem([1.0], [[1.0, 2.0]], ("<=",), [1.0])
    with pytest.raises(ValueError):
        LpProblem([np.nan], [[1.0]], ("<=",), [1.0])

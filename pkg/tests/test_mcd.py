import math

import numpy as np
import pytest

from conftest import absaff
from dccodiff.dcmodel import Affine, build_dc, global_codifferential, hyper_extreme_points
from dccodiff.geometry import translate
from dccodiff.mcd import McdParams, filtered_extreme_points, line_search_exact, mcd_run
from dccodiff.minnorm import min_norm_point
from dccodiff.optimality import UnboundedError, check_global_min
from dccodiff.penalty import build_penalty
from oracles import random_expr

ABS = build_dc(absaff(0, [1]))


def test_line_search_examples(trap):
    assert line_search_exact(ABS, [1.0], [1.0], 2.0) == (1.0, 0.0)
    assert line_search_exact(ABS, [1.0], [-1.0], 2.0) == (0.0, 1.0)
    # failing vertex at -2 gives v = -0.4; moving along -v reaches the global minimizer
    alpha, val = line_search_exact(trap, [-2.0], [-0.4], 10.0)
    assert val == pytest.approx(0.0, abs=1e-12)
    assert -2.0 + 0.4 * alpha == pytest.approx(0.0, abs=1e-12)


def test_line_search_vs_scan(rng):
    alphas = np.linspace(0, 5, 100001)
    for _ in range(15):
        d = int(rng.integers(1, 3))
        f = build_dc(random_expr(rng, d, depth=3), dim=d)
        x, w = rng.normal(size=d), rng.normal(size=d)
        _, val = line_search_exact(f, x, w, 5.0)
        # vectorized evaluation of f(x - alpha w)
        X = x[None, :] - alphas[:, None] * w[None, :]
        g = (f.plus.a + X @ f.plus.v.T).max(1) - (f.minus.a + X @ f.minus.v.T).max(1)
        assert val <= g.min() + 1e-9


def test_mcd_escapes_local_min(trap):
    tr = mcd_run(trap, [-2.0], McdParams(alpha_star=10))
    assert abs(tr.x_final[0]) <= 1e-7 and tr.f_final <= 1e-7
    assert tr.verdict.globally_optimal
    assert check_global_min(trap, tr.x_final).globally_optimal


def test_mcd_abs_one_step():
    tr = mcd_run(ABS, [5.0], McdParams(alpha_star=10))
    assert len(tr.iterates) == 1
    assert tr.x_final[0] == pytest.approx(0.0, abs=1e-12)


def test_mcd_equality_penalty(eq_problem):
    F3 = build_penalty(eq_problem, 3.0)
    tr = mcd_run(F3, [2.0, 0.0], McdParams(alpha_star=10))
    assert np.allclose(tr.x_final, [0.0, 0.0], atol=1e-7)
    # F_3(0, 0) = |0 - 2| + 0 + 3 * 0 = 2
    assert tr.f_final == pytest.approx(2.0)
    vals = tr.values
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    assert tr.verdict.globally_optimal


def test_mcd_monotone_random(rng):
    done = 0
    while done < 25:
        d = int(rng.integers(1, 3))
        f = build_dc(random_expr(rng, d, depth=3), dim=d)
        x0 = rng.normal(scale=3, size=d)
        try:
            tr = mcd_run(f, x0, McdParams(alpha_star=20, max_iters=50))
        except UnboundedError:
            continue
        done += 1
        vals = tr.values
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
        if tr.verdict.globally_optimal:
            assert check_global_min(f, tr.x_final).globally_optimal


def test_mcd_unbounded():
    with pytest.raises(UnboundedError) as err:
        mcd_run(build_dc(Affine(0, [1])), [0.0], McdParams(alpha_star=1))
    assert err.value.direction[0] > 0


def test_mu_filter(trap):
    full = filtered_extreme_points(trap, [-2.0])
    assert len(full) == len(hyper_extreme_points(trap, [-2.0]))
    for mu in (0.5, 3.0, 5.0):
        sub = filtered_extreme_points(trap, [-2.0], mu)
        assert {tuple(r) for r in full if r[0] <= mu} == {tuple(r) for r in sub}
    # with mu < 3 the escaping vertex (3, -1) is filtered out and descent stalls at -2
    tr = mcd_run(trap, [-2.0], McdParams(alpha_star=10, mu=2.0))
    assert tr.x_final[0] == pytest.approx(-2.0)


def test_step_direction_convention(trap):
    # -v with a < 0 is the same half-line as the certificate point x + v / a
    cd = global_codifferential(trap, [-2.0])
    mn = min_norm_point(translate(cd.hypo, np.array([3.0, -1.0])))
    assert mn.a < 0
    assert np.sign(-mn.v[0]) == np.sign(mn.v[0] / mn.a)


def test_params_validation():
    for bad in (dict(alpha_star=0), dict(alpha_star=math.inf), dict(alpha_star=1, max_iters=0),
                dict(alpha_star=1, stop_tol=-1), dict(alpha_star=1, mu=0)):
        with pytest.raises(ValueError):
            McdParams(**bad)

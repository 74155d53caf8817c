import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EQ_F0, EQ_F1, INEQ_F0, INEQ_F1, LOCAL_TRAP, absaff
from dccodiff import geometry as geo
from dccodiff.dcmodel import (
    Abs, Affine, Const, DimensionError, Max, Min, Neg, Scale, Sum, build_dc, canonical_order,
    global_codifferential, hyper_extreme_points,
)
from dccodiff.geometry import Polytope
from dccodiff.penalty import Problem, build_penalty
from oracles import pointwise_codiff, random_expr, same_hull
from strategies import exprs


def vset(P):
    return {tuple(r) for r in np.asarray(P.vertices if isinstance(P, Polytope) else P)}


def test_abs_support_sets():
    f = build_dc(absaff(0, [1]))
    assert vset(geo.prune_to_extreme(f.plus)) == {(0, 1), (0, -1)}
    assert vset(f.minus) == {(0, 0)}


def test_local_trap_codifferential(rng):
    f = build_dc(LOCAL_TRAP)
    cd = global_codifferential(f, [-2.0])
    hypo = [(0, -1), (0, -3), (-8, 3), (-8, 1)]
    hyper = [(3, 1), (3, -1), (0, 2), (8, -2)]
    assert same_hull(cd.hypo.vertices, hypo, rng)
    assert same_hull(cd.hyper.vertices, hyper, rng)
    assert vset(hyper_extreme_points(f, [-2.0])) == set(hyper)
    assert cd.f_at_base == 1.0


def test_equality_objective_hypo(rng):
    cd = global_codifferential(build_dc(EQ_F0), [2.0, 0.0])
    assert same_hull(cd.hypo.vertices, [(0, 1, 2), (0, 1, -2), (0, -1, 2), (0, -1, -2)], rng)
    assert vset(cd.hyper) == {(0, 0, 0)}
    cd1 = global_codifferential(build_dc(EQ_F1), [2.0, 0.0])
    assert same_hull(cd1.hypo.vertices, [(0, 1, 0), (-4, -1, 0)], rng)
    assert same_hull(cd1.hyper.vertices, [(0, 0, 1), (0, 0, -1)], rng)


def test_inequality_codifferentials(rng):
    cd0 = global_codifferential(build_dc(INEQ_F0), [-1.0])
    assert same_hull(cd0.hypo.vertices, [(-10, 1), (0, -1)], rng)
    cd1 = global_codifferential(build_dc(INEQ_F1), [-1.0])
    assert same_hull(cd1.hypo.vertices, [(-6, 2), (-8, 0), (0, 0), (-2, -2)], rng)
    assert same_hull(cd1.hyper.vertices, [(2, -1), (4, 1), (6, -1), (0, 1)], rng)


def test_evaluate_examples():
    assert build_dc(LOCAL_TRAP)([-2.0]) == 1.0
    assert build_dc(absaff(0, [1]))([0.0]) == 0.0
    F2 = build_penalty(Problem(1, INEQ_F0, (INEQ_F1,)), 2.0)
    assert F2([-1.0]) == 5.0


def test_codifferential_examples(rng):
    cd = global_codifferential(build_dc(absaff(0, [1])), [0.0])
    assert same_hull(cd.hypo.vertices, [(0, 1), (0, -1)], rng)
    assert vset(cd.hyper) == {(0, 0)}
    F3 = build_penalty(Problem(2, EQ_F0, (), (EQ_F1,)), 3.0)
    C = hyper_extreme_points(F3, [2.0, 0.0])
    assert vset(C) == {(0, -3, 3), (12, 3, 3), (0, -3, -3), (12, 3, -3)}
    assert vset(hyper_extreme_points(build_dc(absaff(0, [1])), [0.0])) == {(0, 0)}


def test_canonical_order_is_lexicographic():
    V = np.array([(3, 1), (0, 2), (3, -1), (8, -2)], float)
    assert [tuple(r) for r in canonical_order(V)] == [(0, 2), (3, -1), (3, 1), (8, -2)]


def test_dimension_errors():
    with pytest.raises(DimensionError) as err:
        build_dc(Sum((Affine(0, [1]), Max((Const(1), Affine(0, [1, 2]))))))
    assert err.value.path == "/sum[1]/max[1]"
    with pytest.raises(DimensionError):
        build_dc(Const(3))
    assert build_dc(Const(3), dim=2)([1.0, 1.0]) == 3.0
    with pytest.raises(DimensionError):
        global_codifferential(build_dc(Affine(0, [1])), [1.0, 2.0])
    with pytest.raises(ValueError):
        Max(())


def test_pointwise_calculus_route_agrees(rng):
    # max example where the (f_i(x) - f(x), 0) shift terms matter. The pointwise
    # rules may move hypo by (0, w) and hyper by -(0, w); nothing else may differ.
    for x in (-2.0, -1.3, 0.0, 0.7):
        cd = global_codifferential(build_dc(LOCAL_TRAP), [x])
        h, H, fx = pointwise_codiff(LOCAL_TRAP, [x])
        assert fx == pytest.approx(cd.f_at_base)
        hyp = geo.prune_to_extreme(Polytope(H)).vertices
        lib = geo.prune_to_extreme(cd.hyper).vertices
        shift = hyp.mean(axis=0) - lib.mean(axis=0)
        assert shift[0] == pytest.approx(0.0, abs=1e-12)
        assert same_hull(cd.hyper.vertices, H - shift, rng)
        assert same_hull(cd.hypo.vertices, h + shift, rng)
        for dx in rng.normal(scale=3, size=(20, 1)):
            alt = (h[:, 0] + h[:, 1:] @ dx).max() + (H[:, 0] + H[:, 1:] @ dx).min()
            assert cd.increment(dx) == pytest.approx(alt, abs=1e-9)


def test_pointwise_calculus_route_random(rng):
    for _ in range(40):
        d = int(rng.integers(1, 3))
        e = random_expr(rng, d, depth=3)
        f = build_dc(e, dim=d)
        x = rng.normal(scale=2, size=d)
        cd = global_codifferential(f, x)
        h, H, fx = pointwise_codiff(e, x)
        assert fx == pytest.approx(cd.f_at_base, abs=1e-9)
        # the two routes may split f differently; their increments must agree
        for dx in rng.normal(scale=3, size=(20, d)):
            alt = (h[:, 0] + h[:, 1:] @ dx).max() + (H[:, 0] + H[:, 1:] @ dx).min()
            assert cd.increment(dx) == pytest.approx(alt, abs=1e-8)


def check_increment_identity(f, rng, n=200):
    d = f.dim
    for _ in range(n):
        x = rng.normal(scale=3, size=d)
        dx = rng.normal(scale=3, size=d)
        cd = global_codifferential(f, x)
        assert f(x + dx) - f(x) == pytest.approx(cd.increment(dx), abs=1e-8)


def test_increment_identity_examples(rng):
    for e, d in ((LOCAL_TRAP, 1), (INEQ_F1, 1), (EQ_F0, 2), (EQ_F1, 2)):
        check_increment_identity(build_dc(e, d), rng)
    check_increment_identity(build_penalty(Problem(2, EQ_F0, (), (EQ_F1,)), 3.0), rng)


@settings(max_examples=60, deadline=None)
@given(e=exprs(2), seed=st.integers(0, 2**32 - 1))
def test_expression_and_dc_agree(e, seed):
    rng = np.random.default_rng(seed)
    f = build_dc(e, dim=2)
    for x in rng.normal(scale=4, size=(25, 2)):
        assert f(x) == pytest.approx(e(x), abs=1e-10 * (1 + abs(e(x))))


@settings(max_examples=40, deadline=None)
@given(e=exprs(1), seed=st.integers(0, 2**32 - 1))
def test_increment_identity_and_normalization(e, seed):
    rng = np.random.default_rng(seed)
    f = build_dc(e, dim=1)
    for _ in range(10):
        x = rng.normal(scale=3, size=1)
        cd = global_codifferential(f, x)
        assert cd.hypo.a.max() == pytest.approx(0.0, abs=1e-8)
        assert cd.hyper.a.min() == pytest.approx(0.0, abs=1e-8)
        dx = rng.normal(scale=3, size=1)
        assert f(x + dx) - f(x) == pytest.approx(cd.increment(dx), abs=1e-8)


def test_max_min_duality(rng):
    es = (absaff(1, [2]), Sum((Affine(0, [-1]), Const(2))), Neg(absaff(-1, [1])))
    f = build_dc(Neg(Max(es)))
    g = build_dc(Min(tuple(Neg(t) for t in es)))
    for x in rng.normal(scale=5, size=(200, 1)):
        assert f(x) == pytest.approx(g(x), abs=1e-12)


def test_scale_zero_and_negative():
    e = absaff(0, [1])
    assert build_dc(Scale(0, e), dim=1)([5.0]) == 0.0
    f = build_dc(Scale(-2, e))
    assert f([3.0]) == -6.0
    assert vset(geo.prune_to_extreme(f.minus)) == {(0, 2), (0, -2)}

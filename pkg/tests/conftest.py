import sys

import numpy as np
import pytest

from dccodiff.dcmodel import Abs, Affine, Const, Min, Neg, Scale, Sum, build_dc
from dccodiff.penalty import Problem


def absaff(a, v):
    return Abs(Affine(a, v))


# min{2|x|, |x + 2| + 1}
LOCAL_TRAP = Min((Scale(2, absaff(0, [1])), Sum((absaff(2, [1]), Const(1)))))

INEQ_F0 = absaff(-4, [1])
INEQ_F1 = Sum((Min((absaff(-2, [1]), absaff(2, [1]))), Const(-1)))

EQ_F0 = Sum((absaff(-2, [1, 0]), Scale(2, absaff(0, [0, 1]))))
EQ_F1 = Sum((absaff(0, [1, 0]), Neg(absaff(0, [0, 1]))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def trap():
    return build_dc(LOCAL_TRAP)


@pytest.fixture
def ineq_problem():
    return Problem(1, INEQ_F0, (INEQ_F1,), ipcq_asserted=True)


@pytest.fixture
def eq_problem():
    return Problem(2, EQ_F0, (), (EQ_F1,))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(k))

"""Global optimality certificates and codifferential descent for piecewise-affine DC functions."""

from .dcmodel import (
    Abs, Affine, CodiffPair, Const, DCFunction, DimensionError, Expr, Max, Min, Neg, Scale, Sum,
    build_dc, evaluate, global_codifferential, hyper_extreme_points,
)
from .geometry import Polytope, SupportPoint, conv_union, minkowski_sum, prune_to_extreme
from .linprog import LpProblem, LpStatus, solve_lp
from .mcd import McdParams, McdTrace, line_search_exact, mcd_run
from .minnorm import MinNormResult, min_norm_point
from .optimality import (
    CertificateError, OptimalityReport, UnboundedError, ZVerdict, bounded_below_codiff,
    check_constrained, check_global_max, check_global_min, check_global_min_lp,
)
from .penalty import Problem, ProbeOutcome, build_penalty, sublevel_bounded_probe
from .problemfile import ProblemFile, load_corpus, parse_problem, parse_problem_file, serialize
from .supportset import (
    NonnegVerdict, Verdict, attained_minimizer, conjugate_value, eps_subdiff_contains, eval_support,
    infimum, is_bounded_below, nonneg_on_sublevel, nonnegativity_certificate,
)

__version__ = "0.1.0"

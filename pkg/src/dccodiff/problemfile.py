"""
Text format for DC problems.

A file is a list of ``key: value`` lines. Lines starting with whitespace
continue the previous value, ``#`` starts a comment. ``inequality``,
``equality`` and ``slope`` may repeat; every other key appears at most once.

    dim: 1
    objective: min(scale(2, abs(affine(0, [1]))),
                   sum(abs(affine(2, [1])), const(1)))
    point: [-2]

Expression grammar::

    expr   = const | affine | unary | scale | nary
    const  = "const" "(" number ")"
    affine = "affine" "(" number "," vector ")"
    unary  = ("abs" | "neg") "(" expr ")"
    scale  = "scale" "(" number "," expr ")"
    nary   = ("sum" | "max" | "min") "(" expr { "," expr } ")"
    vector = "[" number { "," number } "]"
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources

from .dcmodel import Abs, Affine, Const, Expr, Max, Min, Neg, Scale, Sum
from .penalty import Problem

KNOWN_KEYS = ("dim", "objective", "inequality", "equality", "ipcq", "ipcq_note", "point",
              "lambda", "alpha_star", "mu", "max_iters", "tol_opt", "slope", "route")
ROUTES = ("auto", "unconstrained", "constrained", "penalty")
REPEATABLE = ("inequality", "equality", "slope")

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>[+-]?(?:inf|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))
  | (?P<name>[a-z_]+)
  | (?P<punct>[(),\[\]])
""", re.VERBOSE)


@dataclass(frozen=True)
class ProblemFile:
    problem: Problem
    point: tuple[float, ...] | None = None
    lam: float | None = None
    alpha_star: float | None = None
    mu: float | None = None
    max_iters: int | None = None
    tol_opt: float | None = None
    slopes: tuple[tuple[float, ...], ...] = field(default_factory=tuple)
    route: str = "auto"

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")


class _Source:
    """Value text joined from one or more lines, remembering where each char came from."""

    def __init__(self, filename: str):
        self.filename = filename
        self.text = ""
        self.where: list[tuple[int, int]] = []
        self.lines: dict[int, str] = {}

    def add(self, lineno: int, col: int, chunk: str, full: str):
        if self.text:
            self.text += " "
            self.where.append((lineno, col))
        self.text += chunk
        self.where.extend((lineno, col + k) for k in range(len(chunk)))
        self.lines[lineno] = full

    def error(self, msg: str, pos: int) -> SyntaxError:
        if not self.where:
            return SyntaxError(msg, (self.filename, 1, 1, ""))
        line, col = self.where[min(pos, len(self.where) - 1)]
        if pos >= len(self.where):
            col += 1
        return SyntaxError(msg, (self.filename, line, col, self.lines.get(line, "")))


class _ExprParser:
    def __init__(self, src: _Source):
        self.src = src
        self.toks = []
        pos = 0
        text = src.text
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise src.error(f"unexpected character {text[pos]!r}", pos)
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.toks.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str, value: str | None = None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = repr(value) if value is not None else kind
            got = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise self.src.error(f"expected {want}, found {got}", tok[2])
        self.i += 1
        return tok

    def number(self) -> float:
        return float(self.take("num")[1])

    def vector(self) -> tuple[float, ...]:
        self.take("punct", "[")
        out = [self.number()]
        while self.peek()[1] == ",":
            self.take("punct", ",")
            out.append(self.number())
        self.take("punct", "]")
        return tuple(out)

    def finish(self):
        self.take("end")

    def expr(self) -> Expr:
        _, name, pos = self.take("name")
        self.take("punct", "(")
        match name:
            case "const":
                node = Const(self.number())
            case "affine":
                a = self.number()
                self.take("punct", ",")
                node = Affine(a, self.vector())
            case "abs":
                node = Abs(self.expr())
            case "neg":
                node = Neg(self.expr())
            case "scale":
                k = self.number()
                self.take("punct", ",")
                node = Scale(k, self.expr())
            case "sum" | "max" | "min":
                terms = [self.expr()]
                while self.peek()[1] == ",":
                    self.take("punct", ",")
                    terms.append(self.expr())
                node = {"sum": Sum, "max": Max, "min": Min}[name](tuple(terms))
            case _:
                raise self.src.error(f"unknown node kind {name!r}", pos)
        self.take("punct", ")")
        return node


def parse_expr(text: str) -> Expr:
    src = _Source("<expr>")
    src.add(1, 1, text, text)
    p = _ExprParser(src)
    e = p.expr()
    p.finish()
    return e


def _scalar(src: _Source, kind):
    p = _ExprParser(src)
    tok = p.take("num") if kind is not bool else p.take("name")
    p.finish()
    value = tok[1]
    if kind is bool:
        if value not in ("true", "false"):
            raise src.error("expected true or false", tok[2])
        return value == "true"
    if kind is int:
        if not re.fullmatch(r"[+-]?\d+", value):
            raise src.error("expected an integer", tok[2])
        return int(value)
    return float(value)


def _vector(src: _Source) -> tuple[float, ...]:
    p = _ExprParser(src)
    v = p.vector()
    p.finish()
    return v


def _collect(text: str, filename: str) -> dict[str, list[_Source]]:
    entries: dict[str, list[_Source]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0].isspace():
            if current is None:
                raise SyntaxError("continuation line without a key", (filename, lineno, 1, raw))
            stripped = line.lstrip()
            current.add(lineno, len(line) - len(stripped) + 1, stripped, raw)
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise SyntaxError("expected 'key: value'", (filename, lineno, len(line) + 1, raw))
        if key not in KNOWN_KEYS:
            raise SyntaxError(f"unknown key {key!r}", (filename, lineno, 1, raw))
        if key in entries and key not in REPEATABLE:
            raise SyntaxError(f"duplicate key {key!r}", (filename, lineno, 1, raw))
        current = _Source(filename)
        value = rest.strip()
        if value:
            current.add(lineno, line.index(value, len(key) + 1) + 1, value, raw)
        else:
            current.lines[lineno] = raw
            current.where = []
        entries.setdefault(key, []).append(current)
    return entries


def parse_problem_file(text: str, filename: str = "<problem>") -> ProblemFile:
    """Parse a problem document.

    Raises SyntaxError (with line and column) on malformed input and
    DimensionError (with the node path) when expression dimensions disagree.
    """
    entries = _collect(text, filename)
    if "dim" not in entries or "objective" not in entries:
        raise SyntaxError("a problem needs both 'dim' and 'objective'", (filename, 1, 1, ""))

    def one(key, kind):
        if key not in entries:
            return None
        return _scalar(entries[key][0], kind)

    def expr(src):
        p = _ExprParser(src)
        e = p.expr()
        p.finish()
        return e

    dim = one("dim", int)
    note = entries["ipcq_note"][0].text if "ipcq_note" in entries else ""
    route = "auto"
    if "route" in entries:
        src = entries["route"][0]
        route = src.text
        if route not in ROUTES:
            raise src.error(f"route must be one of {', '.join(ROUTES)}", 0)
    problem = Problem(
        dim=dim,
        objective=expr(entries["objective"][0]),
        inequalities=tuple(expr(s) for s in entries.get("inequality", [])),
        equalities=tuple(expr(s) for s in entries.get("equality", [])),
        ipcq_asserted=bool(one("ipcq", bool)),
        ipcq_note=note,
    )
    point = _vector(entries["point"][0]) if "point" in entries else None
    if point is not None and len(point) != dim:
        src = entries["point"][0]
        raise SyntaxError(f"point has dimension {len(point)}, expected {dim}",
                          (filename, src.where[0][0], src.where[0][1], src.lines[src.where[0][0]]))
    return ProblemFile(
        problem=problem,
        point=point,
        lam=one("lambda", float),
        alpha_star=one("alpha_star", float),
        mu=one("mu", float),
        max_iters=one("max_iters", int),
        tol_opt=one("tol_opt", float),
        slopes=tuple(_vector(s) for s in entries.get("slope", [])),
        route=route,
    )


def parse_problem(text: str) -> Problem:
    return parse_problem_file(text).problem


def _num(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _vec(v) -> str:
    return "[" + ", ".join(_num(t) for t in v) + "]"


def serialize_expr(e: Expr) -> str:
    match e:
        case Const(c=c):
            return f"const({_num(c)})"
        case Affine(a=a, v=v):
            return f"affine({_num(a)}, {_vec(v)})"
        case Abs(child=ch):
            return f"abs({serialize_expr(ch)})"
        case Neg(child=ch):
            return f"neg({serialize_expr(ch)})"
        case Scale(k=k, child=ch):
            return f"scale({_num(k)}, {serialize_expr(ch)})"
        case Sum(terms=ts) | Max(terms=ts) | Min(terms=ts):
            return f"{type(e).__name__.lower()}(" + ", ".join(serialize_expr(t) for t in ts) + ")"
    raise TypeError(f"cannot serialize {type(e).__name__}")


def serialize(pf: ProblemFile | Problem) -> str:
    """Canonical text form; ``parse_problem_file(serialize(pf)) == pf``."""
    if isinstance(pf, Problem):
        pf = ProblemFile(pf)
    p = pf.problem
    lines = [f"dim: {p.dim}", f"objective: {serialize_expr(p.objective)}"]
    lines += [f"inequality: {serialize_expr(g)}" for g in p.inequalities]
    lines += [f"equality: {serialize_expr(h)}" for h in p.equalities]
    if p.ipcq_asserted:
        lines.append("ipcq: true")
    if p.ipcq_note:
        if "#" in p.ipcq_note or "\n" in p.ipcq_note:
            raise ValueError("ipcq_note cannot contain '#' or line breaks")
        lines.append(f"ipcq_note: {p.ipcq_note}")
    if pf.point is not None:
        lines.append(f"point: {_vec(pf.point)}")
    for key, val in (("lambda", pf.lam), ("alpha_star", pf.alpha_star), ("mu", pf.mu), ("tol_opt", pf.tol_opt)):
        if val is not None:
            lines.append(f"{key}: {_num(val)}")
    if pf.max_iters is not None:
        lines.append(f"max_iters: {pf.max_iters}")
    lines += [f"slope: {_vec(s)}" for s in pf.slopes]
    if pf.route != "auto":
        lines.append(f"route: {pf.route}")
    return "\n".join(lines) + "\n"


def corpus_names() -> list[str]:
    root = resources.files("dccodiff") / "corpus"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".dcp"))


def corpus_text(name: str) -> str:
    return (resources.files("dccodiff") / "corpus" / f"{name}.dcp").read_text()


def load_corpus(name: str) -> ProblemFile:
    return parse_problem_file(corpus_text(name), f"{name}.dcp")

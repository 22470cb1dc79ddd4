"""Expressions, instructions and control-flow-graph programs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .interval import Interval, Mode, format_bound

OPS = ("+", "-", "*", "/")
CMPS = ("=", "!=", "<", "<=", ">=", ">")

NEGATED_CMP = {"=": "!=", "!=": "=", "<": ">=", "<=": ">", ">=": "<", ">": "<="}


@dataclass(frozen=True, order=True)
class VarId:
    index: int
    name: str = field(compare=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Var:
    var: VarId


@dataclass(frozen=True)
class Const:
    value: Interval


@dataclass(frozen=True)
class Binop:
    op: str
    left: Expr
    right: Expr

    def __post_init__(self) -> None:
        if self.op not in OPS:
            raise ValueError(f"unknown operator {self.op!r}")


Expr = Union[Var, Const, Binop]


def const(lo, hi=None) -> Const:
    return Const(Interval(lo, lo if hi is None else hi))


def neg(e: Expr) -> Expr:
    """Unary minus as ``0 - e``."""
    return Binop("-", const(0), e)


@dataclass(frozen=True)
class Assign:
    target: VarId
    rhs: Expr

    def __str__(self) -> str:
        return f"{self.target} <- {format_expr(self.rhs)}"


@dataclass(frozen=True)
class Test:
    """The guard ``lhs cmp 0 ?``."""

    __test__ = False  # keeps pytest from collecting it

    lhs: Expr
    cmp: str

    def __post_init__(self) -> None:
        if self.cmp not in CMPS:
            raise ValueError(f"unknown comparison {self.cmp!r}")

    def negated(self) -> Test:
        return Test(self.lhs, NEGATED_CMP[self.cmp])

    def __str__(self) -> str:
        return f"{format_expr(self.lhs)} {self.cmp} 0 ?"


Instr = Union[Assign, Test]


class Arc(NamedTuple):
    src: str
    instr: Instr
    dst: str


@dataclass(frozen=True)
class Assertion:
    point: str
    test: Test
    line: int = 0


@dataclass(frozen=True)
class Program:
    variables: tuple[VarId, ...]
    points: tuple[str, ...]
    entry: str
    arcs: tuple[Arc, ...]
    exit: str | None = None
    assertions: tuple[Assertion, ...] = ()
    mode: Mode | None = None

    def __post_init__(self) -> None:
        pts = set(self.points)
        if self.entry not in pts:
            raise ValueError(f"entry {self.entry!r} is not a program point")
        for a in self.arcs:
            if a.src not in pts or a.dst not in pts:
                raise ValueError(f"arc {a} has an endpoint outside the program")
        if [v.index for v in self.variables] != list(range(len(self.variables))):
            raise ValueError("variable indices must be dense 0..n-1")
        if len({v.name for v in self.variables}) != len(self.variables):
            raise ValueError("variable names must be unique")

    def var(self, name: str) -> VarId:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)


def vars_of(e: Expr) -> frozenset[VarId]:
    if isinstance(e, Var):
        return frozenset((e.var,))
    if isinstance(e, Const):
        return frozenset()
    return vars_of(e.left) | vars_of(e.right)


def cfg_successors(p: Program, loc: str) -> set[tuple[Instr, str]]:
    if loc not in p.points:
        raise KeyError(f"unknown location {loc!r}")
    return {(a.instr, a.dst) for a in p.arcs if a.src == loc}


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_const(c: Interval) -> str:
    # singletons that are not plain decimals keep brackets so they re-parse
    if c.is_singleton:
        s = format_bound(c.lo)
        if "/" not in s:
            return s
    return str(c)


def format_expr(e: Expr) -> str:
    """Render an expression in the concrete syntax accepted by the parser."""
    return _fmt(e, 0)


def _fmt(e: Expr, ctx: int) -> str:
    if isinstance(e, Var):
        return e.var.name
    if isinstance(e, Const):
        s = format_const(e.value)
        return f"({s})" if s.startswith("-") and ctx > 0 else s
    p = _PREC[e.op]
    left = _fmt(e.left, p)
    # right operand of a non-associative position needs a strictly higher level
    right = _fmt(e.right, p + 1)
    s = f"{left} {e.op} {right}"
    return f"({s})" if p < ctx else s

"""Concrete syntax for the analyzed language and its lowering to a CFG.

Example::

    var X, Y;
    X = [-10,20];
    Y = X;
    if (Y <= 0) { Y = -X; }
    assert(Y >= 0);

Comparisons ``a cmp b`` become tests ``a - b cmp 0`` (``a cmp 0`` when ``b``
is the literal 0).  ``mode int;`` / ``mode rat;`` select the value set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .interval import Interval, Mode, parse_bound
from .lang import (
    Arc,
    Assertion,
    Assign,
    Binop,
    Const,
    Expr,
    Program,
    Test,
    Var,
    VarId,
    neg,
)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


# -- source-level AST ------------------------------------------------------


@dataclass(frozen=True)
class Cond:
    left: Expr
    cmp: str
    right: Expr

    def as_test(self) -> Test:
        if isinstance(self.right, Const) and self.right.value == Interval(0, 0):
            return Test(self.left, self.cmp)
        return Test(Binop("-", self.left, self.right), self.cmp)


@dataclass(frozen=True)
class SAssign:
    target: VarId
    rhs: Expr
    line: int = 0


@dataclass(frozen=True)
class SIf:
    cond: Cond
    then: tuple
    orelse: tuple = ()
    line: int = 0


@dataclass(frozen=True)
class SWhile:
    cond: Cond
    body: tuple
    line: int = 0


@dataclass(frozen=True)
class SAssume:
    cond: Cond
    line: int = 0


@dataclass(frozen=True)
class SAssert:
    cond: Cond
    line: int = 0


Stmt = Union[SAssign, SIf, SWhile, SAssume, SAssert]


@dataclass(frozen=True)
class SourceProgram:
    variables: tuple[VarId, ...]
    body: tuple
    mode: Mode | None = None


# -- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|//[^\n]*|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+(?:\.\d*)?|\.\d+)
  | (?P<inf>[+-]?oo\b)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|==|!=|[-+*/()\[\]{},;=<>])
    """,
    re.VERBOSE,
)

_CMP_TOKENS = {"==": "=", "=": "=", "!=": "!=", "<": "<", "<=": "<=", ">=": ">=", ">": ">"}
KEYWORDS = {"var", "mode", "if", "else", "while", "assume", "assert"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[_Tok]:
    toks = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - start + 1))
    return toks


# -- parser ----------------------------------------------------------------


@dataclass
class _Parser:
    toks: list[_Tok]
    pos: int = 0
    vars: dict[str, VarId] = field(default_factory=dict)
    mode: Mode | None = None

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def error(self, msg: str, tok: _Tok | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    def next(self) -> _Tok:
        t = self.tok
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {shown!r}")
        return self.next()

    def program(self) -> SourceProgram:
        while self.at("var") or self.at("mode"):
            if self.next().text == "var":
                self.declare(self.ident_tok())
                while self.at(","):
                    self.next()
                    self.declare(self.ident_tok())
            else:
                t = self.ident_tok()
                if t.text not in ("int", "rat"):
                    self.error("mode must be 'int' or 'rat'", t)
                self.mode = Mode(t.text)
            self.expect(";")
        body = []
        while self.tok.kind != "eof":
            body.append(self.stmt())
        return SourceProgram(tuple(self.vars.values()), tuple(body), self.mode)

    def ident_tok(self) -> _Tok:
        if self.tok.kind != "ident":
            self.error(f"expected an identifier, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def declare(self, t: _Tok) -> None:
        if t.text in KEYWORDS:
            self.error(f"{t.text!r} is a keyword", t)
        if t.text in self.vars:
            self.error(f"variable {t.text} declared twice", t)
        self.vars[t.text] = VarId(len(self.vars), t.text)

    def lookup(self, t: _Tok) -> VarId:
        v = self.vars.get(t.text)
        if v is None:
            self.error(f"undeclared variable {t.text}", t)
        return v

    def block(self) -> tuple:
        self.expect("{")
        out = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            out.append(self.stmt())
        self.expect("}")
        return tuple(out)

    def stmt(self) -> Stmt:
        t = self.tok
        if self.at("if"):
            self.next()
            cond = self.paren_cond()
            then = self.block()
            orelse: tuple = ()
            if self.at("else"):
                self.next()
                orelse = (self.stmt(),) if self.at("if") else self.block()
            return SIf(cond, then, orelse, t.line)
        if self.at("while"):
            self.next()
            cond = self.paren_cond()
            return SWhile(cond, self.block(), t.line)
        if self.at("assume") or self.at("assert"):
            kw = self.next().text
            cond = self.paren_cond()
            self.expect(";")
            return SAssume(cond, t.line) if kw == "assume" else SAssert(cond, t.line)
        if t.kind == "ident" and t.text not in KEYWORDS:
            target = self.lookup(self.next())
            self.expect("=")
            rhs = self.expr()
            self.expect(";")
            return SAssign(target, rhs, t.line)
        self.error(f"expected a statement, found {t.text or 'end of input'!r}")

    def paren_cond(self) -> Cond:
        self.expect("(")
        c = self.cond()
        self.expect(")")
        return c

    def cond(self) -> Cond:
        left = self.expr()
        t = self.tok
        if t.kind != "op" or t.text not in _CMP_TOKENS:
            self.error(f"expected a comparison, found {t.text or 'end of input'!r}")
        self.next()
        return Cond(left, _CMP_TOKENS[t.text], self.expr())

    def expr(self) -> Expr:
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.next().text
            e = Binop(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.at("*") or self.at("/"):
            op = self.next().text
            e = Binop(op, e, self.factor())
        return e

    def factor(self) -> Expr:
        if self.at("-"):
            self.next()
            inner = self.factor()
            if isinstance(inner, Const) and inner.value.is_singleton:
                return Const(inner.value.neg())
            return neg(inner)
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.next()
            return Const(Interval.point(Fraction(t.text)))
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.next()
            return Var(self.lookup(t))
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if self.at("["):
            self.next()
            lo = self.bound()
            self.expect(",")
            hi = self.bound()
            self.expect("]")
            try:
                return Const(Interval(lo, hi))
            except ValueError as exc:
                self.error(str(exc), t)
        self.error(f"expected an expression, found {t.text or 'end of input'!r}")

    def bound(self):
        t = self.tok
        if t.kind == "inf":
            self.next()
            return parse_bound(t.text)
        sign = ""
        if self.at("-") or self.at("+"):
            sign = self.next().text
            if self.tok.kind == "inf":
                return parse_bound(sign + self.next().text)
        if self.tok.kind != "num":
            self.error("expected a number or -oo/+oo in an interval")
        text = self.next().text
        q = Fraction(text)
        if self.at("/"):
            self.next()
            if self.tok.kind != "num":
                self.error("expected a denominator")
            q = q / Fraction(self.next().text)
        return -q if sign == "-" else q


def parse(text: str) -> SourceProgram:
    return _Parser(tokenize(text)).program()


# -- desugaring ------------------------------------------------------------


class _Lowering:
    def __init__(self) -> None:
        self.points = ["entry"]
        self.arcs: list[Arc] = []
        self.assertions: list[Assertion] = []

    def fresh(self) -> str:
        name = f"l{len(self.points)}"
        self.points.append(name)
        return name

    def block(self, stmts, src: str, dst: str) -> None:
        cur = src
        for k, s in enumerate(stmts):
            nxt = dst if k == len(stmts) - 1 else self.fresh()
            self.stmt(s, cur, nxt)
            cur = nxt

    def guarded(self, test: Test, stmts, src: str, dst: str) -> None:
        if not stmts:
            self.arcs.append(Arc(src, test, dst))
            return
        mid = self.fresh()
        self.arcs.append(Arc(src, test, mid))
        self.block(stmts, mid, dst)

    def stmt(self, s: Stmt, src: str, dst: str) -> None:
        if isinstance(s, SAssign):
            self.arcs.append(Arc(src, Assign(s.target, s.rhs), dst))
        elif isinstance(s, SIf):
            t = s.cond.as_test()
            self.guarded(t, s.then, src, dst)
            self.guarded(t.negated(), s.orelse, src, dst)
        elif isinstance(s, SWhile):
            # the loop head is src itself; the body comes back to it
            t = s.cond.as_test()
            self.guarded(t, s.body, src, src)
            self.arcs.append(Arc(src, t.negated(), dst))
        elif isinstance(s, SAssume):
            self.arcs.append(Arc(src, s.cond.as_test(), dst))
        elif isinstance(s, SAssert):
            t = s.cond.as_test()
            self.assertions.append(Assertion(src, t, s.line))
            self.arcs.append(Arc(src, t, dst))
        else:
            raise TypeError(s)


def desugar(sp: SourceProgram) -> Program:
    low = _Lowering()
    exit_pt = "entry"
    if sp.body:
        exit_pt = "exit"
        low.block(sp.body, "entry", exit_pt)
        # appended last so that points are listed in program order
        low.points.append(exit_pt)
    return Program(
        variables=sp.variables,
        points=tuple(low.points),
        entry="entry",
        arcs=tuple(low.arcs),
        exit=exit_pt,
        assertions=tuple(low.assertions),
        mode=sp.mode,
    )


def compile_source(text: str) -> Program:
    return desugar(parse(text))

from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import VARS, int_exprs
from symlin.frontend import ParseError, SAssign, compile_source, parse
from symlin.interval import NEG_INF, POS_INF, Interval, Mode
from symlin.lang import CMPS, Assign, Binop, Const, Test, Var, const, format_expr
from symlin.oracle import concrete_eval, holds


def body(text, decls="var X, Y, Z, T;"):
    return parse(decls + text).body


def test_parse_examples():
    sp = parse("var X, Y; Y = X;")
    X, Y = sp.variables
    assert sp.body == (SAssign(Y, Var(X), 1),)
    (s,) = body("X = [-10,20];")
    assert s.rhs == const(-10, 20)
    (s,) = body("T = (X*Y) - (X*Z) + Z;")
    X, Y, Z, _ = parse("var X, Y, Z, T;").variables
    vx, vy, vz = Var(X), Var(Y), Var(Z)
    assert s.rhs == Binop("+", Binop("-", Binop("*", vx, vy), Binop("*", vx, vz)), vz)


def test_literals():
    (s,) = body("X = [-oo, 3];")
    assert s.rhs == Const(Interval(NEG_INF, 3))
    (s,) = body("X = [1/3, +oo];")
    assert s.rhs == Const(Interval("1/3", POS_INF))
    (s,) = body("X = -0.25;")
    assert s.rhs == const("-1/4")
    (s,) = body("X = 2 - -Y;")
    assert s.rhs.right == Binop("-", const(0), Var(parse("var X, Y;").variables[1]))


def test_precedence_and_associativity():
    X, Y, Z, _ = parse("var X, Y, Z, T;").variables
    (s,) = body("T = X - Y - Z * 2 / X;")
    vx, vy, vz = Var(X), Var(Y), Var(Z)
    assert s.rhs == Binop("-", Binop("-", vx, vy), Binop("/", Binop("*", vz, const(2)), vx))


def test_mode_pragma():
    assert parse("mode int; var X;").mode is Mode.INT
    assert parse("var X;").mode is None


@pytest.mark.parametrize(
    "text, where",
    [
        ("var X; Y = 1;", (1, 8)),
        ("var X;\nX = ;", (2, 5)),
        ("var X; X = [3,1];", (1, 12)),
        ("var X; if (X) { }", (1, 13)),
        ("var X; X = 1", (1, 13)),
        ("var X, X;", (1, 8)),
        ("var X; X = $;", (1, 12)),
        ("var if;", (1, 5)),
    ],
)
def test_errors_carry_position(text, where):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.col) == where


FIG1 = "var X, Y; X = [-10,20]; Y = X; if (Y <= 0) { Y = -X; }"


def test_desugar_fig1():
    p = compile_source(FIG1)
    X, Y = p.variables
    instrs = [str(a.instr) for a in p.arcs]
    assert instrs == ["X <- [-10,20]", "Y <- X", "Y <= 0 ?", "Y <- 0 - X", "Y > 0 ?"]
    into_exit = [a for a in p.arcs if a.dst == p.exit]
    assert {type(a.instr) for a in into_exit} == {Assign, Test}


def test_desugar_while():
    p = compile_source("var X; while (X <= 9) { X = X + 1; }")
    X = p.variables[0]
    head = p.entry
    tests = {a.instr for a in p.arcs if a.src == head}
    minus9 = Binop("-", Var(X), const(9))
    assert tests == {Test(minus9, "<="), Test(minus9, ">")}
    assert any(a.dst == head for a in p.arcs)


def test_desugar_assert():
    p = compile_source("var T; assert(T >= 0);")
    (a,) = p.assertions
    assert a.test == Test(Var(p.variables[0]), ">=") and a.point == p.entry
    assert p.arcs[0].instr == a.test


def test_empty_program():
    p = compile_source("var X;")
    assert p.exit == p.entry and p.arcs == ()


def test_else_if_chain():
    p = compile_source("var X; if (X < 0) { X = 0; } else if (X > 9) { X = 9; } else { X = X; }")
    assert sum(1 for a in p.arcs if isinstance(a.instr, Test)) == 4


@given(int_exprs(max_leaves=8, const_lo=-4, const_hi=4))
def test_format_parse_round_trip(e):
    decl = "var " + ", ".join(v.name for v in VARS) + ";"
    (s,) = parse(f"{decl} X = {format_expr(e)};").body
    assert s.rhs == e


@given(int_exprs(max_leaves=5), st.sampled_from(CMPS), int_exprs(max_leaves=3))
def test_if_guards_complementary(lhs, cmp, rhs):
    decl = "var " + ", ".join(v.name for v in VARS) + ";"
    ops = {"=": "==", "!=": "!=", "<": "<", "<=": "<=", ">=": ">=", ">": ">"}
    p = compile_source(f"{decl} if ({format_expr(lhs)} {ops[cmp]} {format_expr(rhs)}) {{ }} else {{ }}")
    t1, t2 = (a.instr for a in p.arcs)
    for rho in itertools.product(range(-2, 3), repeat=3):
        rho = rho + (0,)
        v1, v2 = concrete_eval(t1.lhs, rho), concrete_eval(t2.lhs, rho)
        assert v1 == v2
        if len(v1) == 1:
            (v,) = v1
            assert holds(t1.cmp, v) != holds(t2.cmp, v)
        elif not v1:
            assert not any(holds(t1.cmp, v) for v in v1) and not any(holds(t2.cmp, v) for v in v2)

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import VARS, int_exprs
from symlin.interval import Mode
from symlin.lang import Binop, Test, Var, const, neg
from symlin.oracle import concrete_eval
from symlin.symconst import (
    EMPTY_ENV,
    TOP,
    SymbolicEnv,
    is_acyclic,
    occ,
    sc_assign,
    sc_gamma_holds,
    sc_join,
    sc_meet,
    sc_test,
    subst,
)

X, Y, Z, W = VARS
vx, vy, vz = Var(X), Var(Y), Var(Z)


def test_occ():
    assert occ(TOP) == frozenset()
    assert occ(Binop("-", vx, Binop("*", const("1/2"), vy))) == {X, Y}
    assert occ(const(0, 1)) == frozenset()


def test_subst():
    assert subst(vy, Y, vx) == vx
    assert subst(Binop("+", vx, vy), Y, TOP) is TOP
    e = Binop("+", vx, const(1))
    assert subst(e, Y, vz) == e
    assert subst(TOP, X, vy) is TOP


def test_assign_examples():
    s = sc_assign(EMPTY_ENV, Y, vx)
    assert s == SymbolicEnv({Y: vx})
    t = sc_assign(s, X, Binop("+", vx, const(1)))
    assert t[Y] is TOP and t[X] is TOP
    u = sc_assign(s, Z, Binop("*", vy, const(2)))
    assert u == SymbolicEnv({Y: vx, Z: Binop("*", vy, const(2))})


def test_self_assignment_through_prior_binding():
    # X := Y; X := X + 1 rewrites X's own occurrence by its old value
    s = sc_assign(EMPTY_ENV, X, vy)
    assert sc_assign(s, X, Binop("+", vx, const(1)))[X] == Binop("+", vy, const(1))


def test_test_is_identity():
    s = SymbolicEnv({Y: vx})
    assert sc_test(s, Test(vy, "<=")) == s
    assert sc_test(EMPTY_ENV, Test(vx, "=")) == EMPTY_ENV
    assert sc_test(s, Test(vx, ">")) == s


def test_join_and_meet():
    a = SymbolicEnv({Y: vx})
    assert sc_join(a, a) == a
    assert sc_join(a, SymbolicEnv({Y: neg(vx)})) == EMPTY_ENV
    assert sc_join(SymbolicEnv({Y: vx, Z: vy}), SymbolicEnv({Y: vx})) == a
    assert sc_meet(a, EMPTY_ENV) == a
    assert sc_meet(EMPTY_ENV, a) == EMPTY_ENV


def test_gamma():
    s = SymbolicEnv({Y: vx})
    assert sc_gamma_holds(s, {X: 3, Y: 3})
    assert not sc_gamma_holds(s, {X: 3, Y: 4})
    assert sc_gamma_holds(EMPTY_ENV, {X: 1, Y: 2})
    assert sc_gamma_holds(SymbolicEnv({Y: const(0, 1)}), {Y: 1})


def test_rational_gamma_uses_hull():
    s = SymbolicEnv({Y: Binop("*", vx, const(2))})
    assert sc_gamma_holds(s, {X: Fraction(3, 2), Y: 3}, Mode.RAT)
    assert not sc_gamma_holds(s, {X: Fraction(3, 2), Y: 2}, Mode.RAT)


def test_self_binding_is_dropped():
    assert SymbolicEnv({X: vx}) == EMPTY_ENV


def test_cycle_is_detected():
    assert not is_acyclic(SymbolicEnv({X: vy, Y: vx}))
    assert is_acyclic(SymbolicEnv({X: vy, Y: vz}))


def test_dump():
    assert SymbolicEnv({Y: vx}).dump([X, Y]) == "X := ⊤\nY := X"


assignments = st.lists(st.tuples(st.sampled_from(VARS[:3]), int_exprs(max_leaves=4)), min_size=1, max_size=6)


@given(assignments)
def test_assign_sequence_stays_acyclic_and_sound(prog):
    """Run straight-line code concretely and symbolically side by side."""
    envs = {rho for rho in itertools.product(range(-1, 2), repeat=3)}
    s = EMPTY_ENV
    for v, e in prog:
        s = sc_assign(s, v, e)
        assert is_acyclic(s)
        nxt = set()
        for rho in envs:
            for val in concrete_eval(e, rho):
                nxt.add(rho[: v.index] + (val,) + rho[v.index + 1 :])
        envs = set(itertools.islice(sorted(nxt), 200))
        for rho in envs:
            assert sc_gamma_holds(s, rho), (prog, s, rho)


@given(assignments, int_exprs(max_leaves=4))
def test_substitution_over_approximates(prog, e):
    from symlin.engine import SubstStrategy, apply_strat

    envs = {rho for rho in itertools.product(range(-1, 2), repeat=3)}
    s = EMPTY_ENV
    for v, rhs in prog:
        s = sc_assign(s, v, rhs)
        nxt = set()
        for rho in envs:
            for val in concrete_eval(rhs, rho):
                nxt.add(rho[: v.index] + (val,) + rho[v.index + 1 :])
        envs = set(itertools.islice(sorted(nxt), 100))
    for strategy in SubstStrategy:
        e2 = apply_strat(e, s, strategy)
        for rho in envs:
            assert concrete_eval(e, rho) <= concrete_eval(e2, rho), (e, e2, strategy)


def test_join_with_top_is_pointwise():
    a = SymbolicEnv({Y: vx, Z: vx})
    b = SymbolicEnv({Y: vx, Z: vy})
    assert sc_join(a, b) == SymbolicEnv({Y: vx})
    assert sc_join(a, b).leq(a) is False
    assert a.leq(sc_join(a, b))


def test_interval_constants_are_kept():
    s = sc_assign(EMPTY_ENV, X, const(0, 1))
    assert s[X] == const(0, 1)


@pytest.mark.parametrize("bad", [{X: vy, Y: vx}])
def test_assign_never_creates_cycles(bad):
    s = EMPTY_ENV
    for v, e in bad.items():
        s = sc_assign(s, v, e)
    assert is_acyclic(s)

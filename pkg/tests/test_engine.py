from __future__ import annotations

from fractions import Fraction

import networkx as nx
import pytest

from symlin.domain import IntervalEnv
from symlin.engine import (
    AbstractState,
    AnalysisOptions,
    SubstStrategy,
    apply_strat,
    check_assertions,
    post_fixpoint_violations,
    reduce,
    solve,
    transfer,
    widening_points,
)
from symlin.frontend import compile_source
from symlin.interval import POS_INF, Interval, Mode
from symlin.lang import Assign, Binop, Test, Var, VarId, const
from symlin.linearize import MultStrategy
from symlin.oracle import collect
from symlin.symconst import SymbolicEnv

I = Interval
Q = Fraction
X, Y, Z, U, V, T = (VarId(k, n) for k, n in enumerate(["X", "Y", "Z", "U", "V", "T"]))
vx, vy, vz, vu, vv = Var(X), Var(Y), Var(Z), Var(U), Var(V)
half = const(Q(1, 2))


def mul(a, b):
    return Binop("*", a, b)


def sub(a, b):
    return Binop("-", a, b)


def test_apply_strat_examples():
    assert apply_strat(vy, SymbolicEnv({Y: vx}), SubstStrategy.FULL) == vx
    s = SymbolicEnv({X: const(0, 1), Y: vx})
    e = sub(vx, mul(half, vy))
    assert apply_strat(e, s, SubstStrategy.FULL) == sub(const(0, 1), mul(half, const(0, 1)))
    assert apply_strat(e, s, SubstStrategy.FULL_NOCONST) == sub(vx, mul(half, vx))
    s = SymbolicEnv({U: mul(vx, vy), V: mul(sub(const(1), vx), vz)})
    assert apply_strat(sub(vu, vv), s, SubstStrategy.FULL_NOCONST) == sub(mul(vx, vy), mul(sub(const(1), vx), vz))


def test_apply_strat_filters():
    s = SymbolicEnv({U: mul(vx, vy), V: Binop("+", vx, const(0, 1)), Y: Binop("+", vx, const(1))})
    assert apply_strat(vu, s, SubstStrategy.LINEAR) == vu
    assert apply_strat(vu, s, SubstStrategy.DETERMINISTIC) == mul(vx, Binop("+", vx, const(1)))
    assert apply_strat(vv, s, SubstStrategy.DETERMINISTIC) == vv
    assert apply_strat(vy, s, SubstStrategy.LINEAR) == Binop("+", vx, const(1))
    assert apply_strat(vu, s, SubstStrategy.NONE) == vu


def test_apply_strat_is_transitive():
    s = SymbolicEnv({Z: vy, Y: vx})
    assert apply_strat(vz, s, SubstStrategy.FULL) == vx


def _num(**bounds):
    byname = {v.name: v for v in (X, Y, Z, U, V, T)}
    return IntervalEnv.of(6, {byname[k]: b for k, b in bounds.items()})


def test_transfer_fig1_then_branch():
    st = AbstractState(_num(X=I(-10, 20), Y=I(-10, 20)), SymbolicEnv({Y: vx}))
    out = transfer(st, Test(vy, "<="), AnalysisOptions())
    assert out.num[X] == I(-10, 0) and out.num[Y] == I(-10, 0)
    assert out.sym == st.sym


def test_transfer_homogeneous_assignment():
    st = AbstractState(_num(X=I(0, 1), Y=I(0, Q(1, 10)), Z=I(0, Q(1, 5))))
    e = Binop("+", sub(mul(vx, vy), mul(vx, vz)), vz)
    out = transfer(st, Assign(T, e), AnalysisOptions(mult=MultStrategy.HOMOGENEOUS))
    assert out.num[T] == I(0, Q(3, 10))


def test_transfer_bottom():
    bot = AbstractState.bottom(6)
    assert transfer(bot, Assign(X, const(1)), AnalysisOptions()).is_bottom


def test_reduce_examples():
    opts = AnalysisOptions()
    st = AbstractState(_num(X=I(-10, 0), Y=I(-10, 20)), SymbolicEnv({Y: vx}))
    assert reduce(st, Y, opts).num[Y] == I(-10, 0)
    st = AbstractState(_num(X=I(-10, 0), Y=I(-10, 20)))
    assert reduce(st, Y, opts) == st
    st = AbstractState(_num(Y=I(-5, 5)), SymbolicEnv({Y: const(0, 1)}))
    assert reduce(st, Y, opts).num[Y] == I(0, 1)


def test_reduction_rounds_in_transfer():
    st = AbstractState(_num(X=I(-10, 20), Y=I(-10, 20)), SymbolicEnv({Y: vx}))
    opts = AnalysisOptions(subst=SubstStrategy.NONE, combo=False, reduce_rounds=1)
    out = transfer(st, Test(vx, "<="), opts)
    assert out.num[Y] == I(-10, 0)


def test_options_validation():
    with pytest.raises(ValueError):
        AnalysisOptions(reduce_rounds=11)
    assert AnalysisOptions(thresholds=(10, 0)).thresholds == (0, 10)


FIG1 = "var X, Y; X = [-10,20]; Y = X; if (Y <= 0) { Y = -X; }"
FIG2 = "var X, Y, Z, T; X = [0,1]; Y = [0,0.1]; Z = [0,0.2]; T = (X*Y) - (X*Z) + Z;"
LOOP = "mode int; var X; X = 0; while (X - 100 <= 0) { X = X + 1; }"


def test_solve_fig1():
    p = compile_source(FIG1)
    assert solve(p, AnalysisOptions()).interval("exit", "Y") == I(0, 20)
    plain = AnalysisOptions(subst=SubstStrategy.NONE, combo=False)
    assert solve(p, plain).interval("exit", "Y") == I(-20, 20)


def test_solve_fig2():
    p = compile_source(FIG2)
    assert solve(p, AnalysisOptions(mult=MultStrategy.HOMOGENEOUS)).interval("exit", "T") == I(0, Q(3, 10))
    raw = AnalysisOptions(subst=SubstStrategy.NONE, combo=False, linearize=False)
    assert solve(p, raw).interval("exit", "T") == I(Q(-1, 5), Q(3, 10))


def test_loop_head_matches_oracle():
    p = compile_source(LOOP)
    res = solve(p, AnalysisOptions(mode=Mode.INT))
    (head,) = res.widening_points
    reached = collect(p)
    values = sorted(rho[0] for rho in reached[head])
    assert res.interval(head, "X") == I(values[0], values[-1]) == I(0, 101)
    assert res.widening_steps >= 1 and res.narrowing_applied == 1


def test_no_narrowing_keeps_widened_bound():
    p = compile_source(LOOP)
    res = solve(p, AnalysisOptions(mode=Mode.INT, decreasing_passes=0))
    (head,) = res.widening_points
    assert res.interval(head, "X") == I(0, POS_INF)


def test_thresholds_stop_widening():
    p = compile_source(LOOP)
    res = solve(p, AnalysisOptions(mode=Mode.INT, decreasing_passes=0, thresholds=(200,)))
    (head,) = res.widening_points
    assert res.interval(head, "X") == I(0, 200)


NESTED = """
mode int;
var I, J, S;
I = 0; S = 0;
while (I < 5) {
  J = 0;
  while (J < I) { S = S + 1; J = J + 1; }
  I = I + 1;
}
"""


def test_nested_loops_have_a_widening_point_per_cycle():
    p = compile_source(NESTED)
    wp = widening_points(p)
    assert len(wp) == 2
    g = nx.DiGraph([(a.src, a.dst) for a in p.arcs]).subgraph(set(p.points) - wp)
    assert nx.is_directed_acyclic_graph(g)
    res = solve(p, AnalysisOptions(mode=Mode.INT))
    assert not post_fixpoint_violations(p, res.states, res.options)
    assert res.interval("exit", "I") == I(5, 5)


def test_assertions():
    p = compile_source(FIG1 + "assert(Y >= 0); assert(Y < 0);")
    verdicts = check_assertions(solve(p, AnalysisOptions()))
    assert [v.status for v in verdicts] == ["proved", "unknown"]


def test_unreachable_branch():
    p = compile_source("var X; X = 1; if (X > 5) { X = 2; }")
    res = solve(p, AnalysisOptions())
    assert res.interval("exit", "X") == I(1, 1)
    assert any(res[pt].is_bottom for pt in p.points)


@pytest.mark.parametrize("rounds", [2, 3])
def test_multi_round_reduction_sound_on_random_programs(rounds):
    from progen import generate
    from symlin.symconst import sc_gamma_holds

    opts = AnalysisOptions(
        mult=MultStrategy.HOMOGENEOUS, subst=SubstStrategy.FULL, combo=True, reduce_rounds=rounds, mode=Mode.INT
    )
    for seed in range(300, 330):
        _, p, reached = generate(seed)
        res = solve(p, opts)
        assert not post_fixpoint_violations(p, res.states, opts)
        for point, envs in reached.items():
            st = res.states[point]
            for rho in envs:
                assert all(rho[v.index] in st.num[v] for v in p.variables)
                assert sc_gamma_holds(st.sym, rho, Mode.INT)

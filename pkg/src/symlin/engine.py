"""Product of the interval domain with symbolic constants, and the solver.

A numeric transfer function sees the instruction's expression after the
substitution strategy has rewritten it with symbolic bindings, then
linearized; the symbolic part always sees the original expression.
"""

from __future__ import annotations

import heapq
import logging
from functools import lru_cache
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

import networkx as nx

from .domain import (
    IntervalEnv,
    assign_affine,
    assign_expr,
    env_join,
    env_leq,
    env_meet,
    env_widen,
    test_affine,
    test_expr,
)
from .interval import Mode, to_bound
from .lang import Arc, Assign, Binop, Const, Expr, Instr, Program, Test, Var, VarId
from .linearize import MultStrategy, linearize
from .symconst import (
    EMPTY_ENV,
    TOP,
    SymbolicEnv,
    occ,
    sc_assign,
    sc_join,
    sc_test,
    subst,
)

log = logging.getLogger(__name__)

# how often a widening point may restart its delay when its input from
# outside the loop changes; bounded so that termination never depends on it
MAX_RESTARTS = 16


class SubstStrategy(Enum):
    NONE = "none"
    FULL = "full"
    FULL_NOCONST = "full-noconst"
    DETERMINISTIC = "det"
    LINEAR = "linear"


@dataclass(frozen=True)
class AnalysisOptions:
    mult: MultStrategy = MultStrategy.SIMPLIFY
    subst: SubstStrategy = SubstStrategy.FULL_NOCONST
    combo: bool = True
    reduce_rounds: int = 0
    widening_delay: int = 1
    thresholds: tuple = ()
    decreasing_passes: int = 1
    mode: Mode = Mode.RAT
    linearize: bool = True
    refine_trunc: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.reduce_rounds <= 10:
            raise ValueError("reduce_rounds must be within 0..10")
        if self.widening_delay < 0 or self.decreasing_passes < 0:
            raise ValueError("iteration counts must be non-negative")
        object.__setattr__(self, "thresholds", tuple(sorted(to_bound(t) for t in self.thresholds)))


@dataclass(frozen=True)
class AbstractState:
    num: IntervalEnv
    sym: SymbolicEnv = EMPTY_ENV

    @classmethod
    def top(cls, n: int) -> AbstractState:
        return cls(IntervalEnv.top(n), EMPTY_ENV)

    @classmethod
    def bottom(cls, n: int) -> AbstractState:
        return cls(IntervalEnv.bottom(n), EMPTY_ENV)

    @property
    def is_bottom(self) -> bool:
        return self.num.is_bottom

    def normalized(self) -> AbstractState:
        if self.num.is_bottom and len(self.sym):
            return AbstractState(self.num, EMPTY_ENV)
        return self


def state_leq(a: AbstractState, b: AbstractState) -> bool:
    if a.is_bottom:
        return True
    if b.is_bottom:
        return False
    return env_leq(a.num, b.num) and a.sym.leq(b.sym)


def state_join(a: AbstractState, b: AbstractState) -> AbstractState:
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    return AbstractState(env_join(a.num, b.num), sc_join(a.sym, b.sym))


def state_widen(a: AbstractState, b: AbstractState, thresholds: Iterable = ()) -> AbstractState:
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    return AbstractState(env_widen(a.num, b.num, thresholds), sc_join(a.sym, b.sym))


def _has_wide_const(e: Expr) -> bool:
    if isinstance(e, Const):
        return not e.value.is_singleton
    if isinstance(e, Binop):
        return _has_wide_const(e.left) or _has_wide_const(e.right)
    return False


def _has_nonlinear_op(e: Expr) -> bool:
    if isinstance(e, Binop):
        return e.op in "*/" or _has_nonlinear_op(e.left) or _has_nonlinear_op(e.right)
    return False


def _eligible(binding, strategy: SubstStrategy) -> bool:
    if binding is TOP or strategy is SubstStrategy.NONE:
        return False
    if strategy is SubstStrategy.FULL:
        return True
    if strategy is SubstStrategy.FULL_NOCONST:
        return bool(occ(binding))
    if _has_wide_const(binding):
        return False
    if strategy is SubstStrategy.LINEAR:
        return not _has_nonlinear_op(binding)
    return True


def apply_strat(e: Expr, s: SymbolicEnv, strategy: SubstStrategy) -> Expr:
    """Rewrite ``e`` with every eligible binding of ``s`` until none applies."""
    if strategy is SubstStrategy.NONE:
        return e
    while True:
        todo = [v for v in sorted(occ(e)) if _eligible(s[v], strategy)]
        if not todo:
            return e
        for v in todo:
            e = subst(e, v, s[v])


def _num_assign(r: IntervalEnv, v: VarId, e: Expr, opts: AnalysisOptions) -> IntervalEnv:
    if not opts.linearize:
        return assign_expr(r, v, e, opts.mode)
    out = None
    for l in linearize(e, r, opts.mult, opts.mode, opts.refine_trunc):
        res = assign_affine(r, v, l, opts.mode)
        out = res if out is None else env_meet(out, res)
    return out


def _num_test(r: IntervalEnv, e: Expr, cmp: str, opts: AnalysisOptions) -> IntervalEnv:
    if not opts.linearize:
        return test_expr(r, e, cmp, opts.mode)
    out = None
    for l in linearize(e, r, opts.mult, opts.mode, opts.refine_trunc):
        res = test_affine(r, l, cmp, opts.mode)
        out = res if out is None else env_meet(out, res)
    return out


def _numeric(r: IntervalEnv, i: Instr, s: SymbolicEnv, opts: AnalysisOptions) -> IntervalEnv:
    if isinstance(i, Assign):
        e = i.rhs
        se = apply_strat(e, s, opts.subst)
        main = _num_assign(r, i.target, se, opts)
        if not opts.combo:
            return main
        legs = [assign_expr(r, i.target, e, opts.mode), main]
        # the linearized leg on the original expression repeats main when nothing was substituted
        if opts.linearize and se is not e:
            legs.append(_num_assign(r, i.target, e, opts))
    else:
        e = i.lhs
        se = apply_strat(e, s, opts.subst)
        main = _num_test(r, se, i.cmp, opts)
        if not opts.combo:
            return main
        legs = [test_expr(r, e, i.cmp, opts.mode), main]
        if opts.linearize and se is not e:
            legs.append(_num_test(r, e, i.cmp, opts))
    out = legs[0]
    for leg in legs[1:]:
        out = env_meet(out, leg)
    return out


def reduce(st: AbstractState, k: VarId, opts: AnalysisOptions) -> AbstractState:
    """Filter the numeric part by ``Vk - S(Vk) = 0``."""
    binding = st.sym[k]
    if st.is_bottom or binding is TOP:
        return st
    num = _num_test(st.num, Binop("-", Var(k), binding), "=", replace(opts, linearize=True))
    return AbstractState(num, st.sym).normalized()


@lru_cache(maxsize=1 << 18)
def transfer(st: AbstractState, i: Instr, opts: AnalysisOptions) -> AbstractState:
    """Abstract effect of one instruction (memoized: every argument is immutable)."""
    if st.is_bottom:
        return st
    num = _numeric(st.num, i, st.sym, opts)
    sym = sc_assign(st.sym, i.target, i.rhs) if isinstance(i, Assign) else sc_test(st.sym, i)
    out = AbstractState(num, sym).normalized()
    for _ in range(opts.reduce_rounds):
        for k in out.sym.bound():
            out = reduce(out, k, opts)
            if out.is_bottom:
                return out
    return out


# --------------------------------------------------------------------------
# fixpoint solving


def _graph(p: Program) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(p.points)
    g.add_edges_from((a.src, a.dst) for a in p.arcs)
    return g


def reverse_postorder(p: Program) -> list[str]:
    return list(reversed(list(nx.dfs_postorder_nodes(_graph(p), p.entry))))


def widening_points(p: Program, order: list[str] | None = None) -> set[str]:
    """Heads of the strongly connected components, recursively, so that
    every cycle of the graph goes through at least one widening point."""
    order = order or reverse_postorder(p)
    rank = {n: k for k, n in enumerate(order)}
    g = _graph(p).subgraph(order)
    heads: set[str] = set()

    def visit(sub: nx.DiGraph) -> None:
        for comp in nx.strongly_connected_components(sub):
            if len(comp) == 1:
                (n,) = comp
                if not sub.has_edge(n, n):
                    continue
            head = min(comp, key=rank.__getitem__)
            heads.add(head)
            visit(sub.subgraph(comp - {head}))

    visit(g)
    return heads


@dataclass
class Analysis:
    program: Program
    options: AnalysisOptions
    states: dict[str, AbstractState]
    widening_points: set[str]
    order: list[str]
    iterations: int = 0
    widening_steps: int = 0
    head_visits: int = 0
    narrowing_applied: int = 0

    def widening_bound(self) -> int:
        """Cap on ``head_visits`` and ``widening_steps`` for loops of the
        shape the solver is tuned for."""
        n = len(self.program.variables)
        k = len(self.options.thresholds)
        return (k + 2) * 2 * n * len(self.widening_points) + self.options.widening_delay

    def __getitem__(self, point: str) -> AbstractState:
        return self.states[point]

    def interval(self, point: str, name: str):
        return self.states[point].num[self.program.var(name)]


def _incoming(p: Program) -> dict[str, list[Arc]]:
    inc: dict[str, list[Arc]] = {n: [] for n in p.points}
    for a in p.arcs:
        inc[a.dst].append(a)
    return inc


def _gather(arcs: list[Arc], states: dict[str, AbstractState], opts: AnalysisOptions, n: int) -> AbstractState:
    acc = AbstractState.bottom(n)
    for a in arcs:
        acc = state_join(acc, transfer(states[a.src], a.instr, opts))
    return acc


def solve(p: Program, opts: AnalysisOptions | None = None) -> Analysis:
    """Post-fixpoint of the abstract equation system for ``p``."""
    opts = opts or AnalysisOptions()
    n = len(p.variables)
    order = reverse_postorder(p)
    rank = {node: k for k, node in enumerate(order)}
    wpoints = widening_points(p, order)
    inc = _incoming(p)
    succ: dict[str, list[str]] = {node: [] for node in p.points}
    for a in p.arcs:
        succ[a.src].append(a.dst)

    # arcs into a widening point from earlier in the order enter its loop
    forward = {w: [a for a in inc[w] if rank.get(a.src, len(order)) < rank[w]] for w in wpoints}

    states = {node: AbstractState.bottom(n) for node in p.points}
    states[p.entry] = AbstractState.top(n)
    visits = {w: 0 for w in wpoints}
    restarts = {w: 0 for w in wpoints}
    entering: dict[str, AbstractState] = {}
    res = Analysis(p, opts, states, wpoints, order)

    heap: list[int] = []
    queued: set[str] = set()

    def push(node: str) -> None:
        if node != p.entry and node in rank and node not in queued:
            queued.add(node)
            heapq.heappush(heap, rank[node])

    for s in succ[p.entry]:
        push(s)
    while heap:
        node = order[heapq.heappop(heap)]
        queued.discard(node)
        res.iterations += 1
        old = states[node]
        new = _gather(inc[node], states, opts, n)
        if node in wpoints:
            seen = _gather(forward[node], states, opts, n)
            if entering.get(node) != seen:
                entering[node] = seen
                if restarts[node] < MAX_RESTARTS:
                    # the enclosing iteration moved on: give this loop a fresh delay
                    restarts[node] += 1
                    visits[node] = 0
            visits[node] += 1
            res.head_visits += 1
            if visits[node] > opts.widening_delay:
                cand = state_widen(old, state_join(old, new), opts.thresholds)
                if cand.num != old.num:
                    res.widening_steps += 1
            else:
                cand = state_join(old, new)
        else:
            cand = state_join(old, new)
        if cand != old:
            states[node] = cand
            for s in succ[node]:
                push(s)

    for _ in range(opts.decreasing_passes):
        if not _decreasing_pass(p, states, order, inc, opts, n):
            break
        res.narrowing_applied += 1
    return res


def _decreasing_pass(p, states, order, inc, opts, n) -> bool:
    """One Gauss-Seidel narrowing sweep; kept only if it stays a post-fixpoint."""
    trial = dict(states)
    for node in order:
        if node == p.entry:
            continue
        new = _gather(inc[node], trial, opts, n)
        old = trial[node]
        if old.is_bottom or new.is_bottom:
            trial[node] = AbstractState.bottom(n) if new.is_bottom else old
            continue
        trial[node] = AbstractState(env_meet(old.num, new.num), old.sym).normalized()
    if trial == states:
        return False
    if post_fixpoint_violations(p, trial, opts):
        log.debug("decreasing pass discarded: result is not a post-fixpoint")
        return False
    states.update(trial)
    return True


def post_fixpoint_violations(p: Program, states: dict[str, AbstractState], opts: AnalysisOptions) -> list[Arc]:
    """Arcs whose transfer is not absorbed by the state at their target."""
    bad = []
    for a in p.arcs:
        if a.dst == p.entry:
            continue
        if not state_leq(transfer(states[a.src], a.instr, opts), states[a.dst]):
            bad.append(a)
    return bad


@dataclass(frozen=True)
class Verdict:
    point: str
    test: Test
    line: int
    proved: bool

    @property
    def status(self) -> str:
        return "proved" if self.proved else "unknown"


def check_assertions(analysis: Analysis) -> list[Verdict]:
    """An assertion is proved when its negation filters the state to bottom."""
    out = []
    for asr in analysis.program.assertions:
        st = analysis.states[asr.point]
        failing = transfer(st, asr.test.negated(), analysis.options)
        out.append(Verdict(asr.point, asr.test, asr.line, failing.is_bottom))
    return out


__all__ = [
    "AbstractState",
    "Analysis",
    "AnalysisOptions",
    "SubstStrategy",
    "Verdict",
    "apply_strat",
    "check_assertions",
    "post_fixpoint_violations",
    "reduce",
    "solve",
    "transfer",
    "widening_points",
]

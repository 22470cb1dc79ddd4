"""Concrete collecting semantics by exhaustive enumeration (integer mode).

Used as ground truth by the test-suite; environments are tuples indexed by
variable index.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction
from typing import Mapping, Sequence

from .interval import Interval
from .lang import Assign, Binop, Const, Expr, Program, Test, Var, VarId

ConcreteEnv = tuple[int, ...]


class StateCapExceeded(RuntimeError):
    pass


def _lookup(rho, v: VarId):
    if isinstance(rho, (tuple, list)):
        return rho[v.index]
    return rho[v]


def const_values(c: Interval) -> range:
    if not c.is_bounded:
        raise ValueError(f"cannot enumerate the unbounded constant {c}")
    return range(math.ceil(c.lo), math.floor(c.hi) + 1)


def truncate_div(x: int, y: int) -> int:
    return int(Fraction(x, y))


def concrete_eval(e: Expr, rho) -> frozenset[int]:
    """Exact value set of ``e`` at ``rho`` over the integers.

    Interval constants are re-drawn at every evaluation; division by zero
    contributes nothing; division truncates toward zero.
    """
    if isinstance(e, Var):
        return frozenset((_lookup(rho, e.var),))
    if isinstance(e, Const):
        return frozenset(const_values(e.value))
    xs = concrete_eval(e.left, rho)
    ys = concrete_eval(e.right, rho)
    if e.op == "+":
        return frozenset(x + y for x in xs for y in ys)
    if e.op == "-":
        return frozenset(x - y for x in xs for y in ys)
    if e.op == "*":
        return frozenset(x * y for x in xs for y in ys)
    return frozenset(truncate_div(x, y) for x in xs for y in ys if y != 0)


def holds(cmp: str, v: int) -> bool:
    return {
        "=": v == 0,
        "!=": v != 0,
        "<": v < 0,
        "<=": v <= 0,
        ">=": v >= 0,
        ">": v > 0,
    }[cmp]


def concrete_step(instr, rho: ConcreteEnv) -> list[ConcreteEnv]:
    if isinstance(instr, Assign):
        k = instr.target.index
        return [rho[:k] + (v,) + rho[k + 1 :] for v in sorted(concrete_eval(instr.rhs, rho))]
    assert isinstance(instr, Test)
    if any(holds(instr.cmp, v) for v in concrete_eval(instr.lhs, rho)):
        return [rho]
    return []


def initial_states(program: Program, box: Mapping[VarId, tuple[int, int]] | None) -> list[ConcreteEnv]:
    ranges: list[Sequence[int]] = []
    for v in program.variables:
        lo, hi = (box or {}).get(v, (0, 0))
        ranges.append(range(lo, hi + 1))
    return list(itertools.product(*ranges))


def collect(
    program: Program,
    box: Mapping[VarId, tuple[int, int]] | None = None,
    state_cap: int = 200_000,
) -> dict[str, set[ConcreteEnv]]:
    """Least solution of the concrete equation system, with the entry holding
    every environment of ``box`` (variables missing from ``box`` are 0)."""
    out: dict[str, list] = {}
    for a in program.arcs:
        out.setdefault(a.src, []).append(a)
    reached: dict[str, set[ConcreteEnv]] = {p: set() for p in program.points}
    work: deque[tuple[str, ConcreteEnv]] = deque()
    for rho in initial_states(program, box):
        reached[program.entry].add(rho)
        work.append((program.entry, rho))
    total = len(work)
    while work:
        p, rho = work.popleft()
        for a in out.get(p, ()):
            for nxt in concrete_step(a.instr, rho):
                if a.dst == program.entry or nxt in reached[a.dst]:
                    continue
                reached[a.dst].add(nxt)
                total += 1
                if total > state_cap:
                    raise StateCapExceeded(f"more than {state_cap} reachable states")
                work.append((a.dst, nxt))
    return reached


def expr_is_enumerable(e: Expr) -> bool:
    if isinstance(e, Const):
        return e.value.is_bounded
    if isinstance(e, Binop):
        return expr_is_enumerable(e.left) and expr_is_enumerable(e.right)
    return True


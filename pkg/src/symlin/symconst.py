"""Symbolic constant propagation: acyclic maps from variables to expressions."""

from __future__ import annotations

from typing import Iterable, Mapping, Union

from .interval import Interval, Mode, iarith, imeet
from .lang import Binop, Const, Expr, Test, Var, VarId, format_expr, vars_of
from .oracle import concrete_eval, expr_is_enumerable


class _Top:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()
CExpr = Union[Expr, _Top]


def occ(c: CExpr) -> frozenset[VarId]:
    if c is TOP:
        return frozenset()
    return vars_of(c)


def subst(c: CExpr, v: VarId, r: CExpr) -> CExpr:
    """Replace every occurrence of ``v`` in ``c`` by ``r``.

    Substituting TOP erases any expression that mentions ``v``.
    """
    if c is TOP:
        return TOP
    if r is TOP:
        return TOP if v in vars_of(c) else c
    return _subst(c, v, r)


def _subst(e: Expr, v: VarId, r: Expr) -> Expr:
    if isinstance(e, Var):
        return r if e.var == v else e
    if isinstance(e, Const):
        return e
    left, right = _subst(e.left, v, r), _subst(e.right, v, r)
    if left is e.left and right is e.right:
        return e
    return Binop(e.op, left, right)


class SymbolicEnv:
    """Total map from variables to expressions or TOP (the default).

    Immutable; only non-TOP bindings are stored.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Mapping[VarId, CExpr] | Iterable[tuple[VarId, CExpr]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        m = {}
        for v, c in items:
            # V := V says nothing and would be a one-node cycle
            if c is TOP or (isinstance(c, Var) and c.var == v):
                continue
            m[v] = c
        self._map = dict(sorted(m.items()))
        self._hash = None

    def __getitem__(self, v: VarId) -> CExpr:
        return self._map.get(v, TOP)

    def bound(self) -> list[VarId]:
        return list(self._map)

    def items(self):
        return self._map.items()

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolicEnv) and self._map == other._map

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._map.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{v.name} := {format_expr(e)}" for v, e in self._map.items())
        return f"SymbolicEnv({body})"

    def dump(self, variables: Iterable[VarId]) -> str:
        lines = []
        for v in variables:
            c = self[v]
            lines.append(f"{v.name} := {'⊤' if c is TOP else format_expr(c)}")
        return "\n".join(lines)

    def leq(self, other: SymbolicEnv) -> bool:
        return all(self._map.get(v) == e for v, e in other._map.items())


EMPTY_ENV = SymbolicEnv()


def is_acyclic(s: SymbolicEnv) -> bool:
    graph = {v: occ(e) for v, e in s.items()}
    state: dict[VarId, int] = {}

    def visit(v: VarId) -> bool:
        mark = state.get(v)
        if mark == 1:
            return False
        if mark == 2:
            return True
        state[v] = 1
        ok = all(visit(w) for w in graph.get(v, ()))
        state[v] = 2
        return ok

    return all(visit(v) for v in graph)


def sc_assign(s: SymbolicEnv, v: VarId, e: Expr) -> SymbolicEnv:
    prior = s[v]
    out = {w: subst(c, v, prior) for w, c in s.items() if w != v}
    out[v] = subst(e, v, prior)
    res = SymbolicEnv(out)
    assert is_acyclic(res), "symbolic assignment produced a dependency cycle"
    return res


def sc_test(s: SymbolicEnv, t: Test) -> SymbolicEnv:
    return s


def sc_join(s: SymbolicEnv, t: SymbolicEnv) -> SymbolicEnv:
    return SymbolicEnv({v: e for v, e in s.items() if t[v] == e})


def sc_meet(s: SymbolicEnv, t: SymbolicEnv) -> SymbolicEnv:
    return s


def _interval_value(e: Expr, rho) -> Interval:
    if isinstance(e, Var):
        return Interval.point(_lookup(rho, e.var))
    if isinstance(e, Const):
        return e.value
    return iarith(e.op, _interval_value(e.left, rho), _interval_value(e.right, rho))


def _lookup(rho, v: VarId):
    if isinstance(rho, (tuple, list)):
        return rho[v.index]
    return rho[v]


def binding_holds(v: VarId, e: Expr, rho, mode: Mode = Mode.INT) -> bool:
    value = _lookup(rho, v)
    if mode is Mode.INT and expr_is_enumerable(e):
        return value in concrete_eval(e, rho)
    # interval hull: exact when every constant is a singleton and no 0-division
    return not imeet(_interval_value(e, rho), Interval.point(value)).is_empty


def sc_gamma_holds(s: SymbolicEnv, rho, mode: Mode = Mode.INT) -> bool:
    """Does the concrete environment ``rho`` satisfy every binding of ``s``?"""
    return all(binding_holds(v, e, rho, mode) for v, e in s.items())

"""The interval abstract domain and its transfer functions.

Transfer functions come in two flavours: over raw expressions (classic
bottom-up interval evaluation) and over interval affine forms produced by
the linearizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .affine import AffineForm, aadd, ascale, intervalize
from .interval import (
    EMPTY,
    NEG_INF,
    POS_INF,
    TOP,
    Interval,
    Mode,
    bdiv,
    format_interval,
    iarith,
    ijoin,
    ileq,
    imeet,
    is_finite,
    iwiden,
)
from .lang import Binop, Const, Expr, Var, VarId

MAX_REFINE_ROUNDS = 5


@dataclass(frozen=True)
class IntervalEnv:
    """A box over ``size`` variables, or bottom (``values is None``)."""

    size: int
    values: tuple[Interval, ...] | None

    @classmethod
    def top(cls, n: int) -> IntervalEnv:
        return cls(n, (TOP,) * n)

    @classmethod
    def bottom(cls, n: int) -> IntervalEnv:
        return cls(n, None)

    @classmethod
    def of(cls, n: int, bounds: Mapping[VarId, Interval]) -> IntervalEnv:
        vals = [TOP] * n
        for v, i in bounds.items():
            vals[v.index] = i
        return cls.make(n, vals)

    @classmethod
    def make(cls, n: int, vals: Iterable[Interval]) -> IntervalEnv:
        vals = tuple(vals)
        if any(i.is_empty for i in vals):
            return cls(n, None)
        return cls(n, vals)

    @property
    def is_bottom(self) -> bool:
        return self.values is None

    def __getitem__(self, v: VarId) -> Interval:
        """Projection of the box on ``v`` (also lets an env serve as bounds)."""
        if self.values is None:
            return EMPTY
        return self.values[v.index]

    def __hash__(self) -> int:
        return hash((self.size, self.values))

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalEnv) and (self.size, self.values) == (other.size, other.values)

    def set(self, v: VarId, i: Interval, mode: Mode = Mode.RAT) -> IntervalEnv:
        if self.values is None:
            return self
        if mode is Mode.INT:
            i = i.tighten_int()
        vals = list(self.values)
        vals[v.index] = i
        return IntervalEnv.make(self.size, vals)

    def format(self, variables: Iterable[VarId]) -> list[str]:
        if self.values is None:
            return ["unreachable"]
        return [f"{v.name} in {format_interval(self.values[v.index])}" for v in variables]


def _check(r1: IntervalEnv, r2: IntervalEnv) -> None:
    if r1.size != r2.size:
        raise ValueError(f"environments over {r1.size} and {r2.size} variables")


def env_leq(r1: IntervalEnv, r2: IntervalEnv) -> bool:
    _check(r1, r2)
    if r1.is_bottom:
        return True
    if r2.is_bottom:
        return False
    return all(ileq(a, b) for a, b in zip(r1.values, r2.values))


def env_join(r1: IntervalEnv, r2: IntervalEnv) -> IntervalEnv:
    _check(r1, r2)
    if r1.is_bottom:
        return r2
    if r2.is_bottom:
        return r1
    return IntervalEnv(r1.size, tuple(ijoin(a, b) for a, b in zip(r1.values, r2.values)))


def env_meet(r1: IntervalEnv, r2: IntervalEnv) -> IntervalEnv:
    _check(r1, r2)
    if r1.is_bottom or r2.is_bottom:
        return IntervalEnv.bottom(r1.size)
    return IntervalEnv.make(r1.size, (imeet(a, b) for a, b in zip(r1.values, r2.values)))


def env_widen(r1: IntervalEnv, r2: IntervalEnv, thresholds: Iterable = ()) -> IntervalEnv:
    _check(r1, r2)
    if r1.is_bottom:
        return r2
    if r2.is_bottom:
        return r1
    ts = tuple(thresholds)
    return IntervalEnv(r1.size, tuple(iwiden(a, b, ts) for a, b in zip(r1.values, r2.values)))


def eval_expr(e: Expr, r: IntervalEnv, mode: Mode = Mode.RAT) -> Interval:
    """Bottom-up interval evaluation of ``e``."""
    if isinstance(e, Var):
        return r[e.var]
    if isinstance(e, Const):
        return e.value.tighten_int() if mode is Mode.INT else e.value
    assert isinstance(e, Binop)
    return iarith(e.op, eval_expr(e.left, r, mode), eval_expr(e.right, r, mode), mode)


def sign_feasible(i: Interval, cmp: str, mode: Mode = Mode.RAT) -> bool:
    """Can some value of ``i`` satisfy ``v cmp 0``?"""
    if mode is Mode.INT:
        i = i.tighten_int()
    if i.is_empty:
        return False
    if cmp == "=":
        return i.lo <= 0 <= i.hi
    if cmp == "!=":
        return not (i.lo == 0 and i.hi == 0)
    if cmp == "<":
        return i.lo < 0
    if cmp == "<=":
        return i.lo <= 0
    if cmp == ">=":
        return i.hi >= 0
    if cmp == ">":
        return i.hi > 0
    raise ValueError(cmp)


def assign_expr(r: IntervalEnv, v: VarId, e: Expr, mode: Mode = Mode.RAT) -> IntervalEnv:
    if r.is_bottom:
        return r
    return r.set(v, eval_expr(e, r, mode), mode)


def test_expr(r: IntervalEnv, e: Expr, cmp: str, mode: Mode = Mode.RAT) -> IntervalEnv:
    """Feasibility-only filter: bottom when no value of ``e`` passes."""
    if r.is_bottom:
        return r
    if not sign_feasible(eval_expr(e, r, mode), cmp, mode):
        return IntervalEnv.bottom(r.size)
    return r


def assign_affine(r: IntervalEnv, v: VarId, l: AffineForm, mode: Mode = Mode.RAT) -> IntervalEnv:
    if r.is_bottom:
        return r
    return r.set(v, intervalize(l, r, mode), mode)


_NEG_ONE = Interval(-1, -1)


def _nonneg_constraints(l: AffineForm, cmp: str, mode: Mode) -> list[AffineForm]:
    """Forms ``g`` such that the test keeps only states where ``max g >= 0``."""
    neg = ascale(_NEG_ONE, l)
    if cmp == ">=":
        return [l]
    if cmp == "<=":
        return [neg]
    if cmp == "=":
        return [l, neg]
    # strict: shift by one over the integers, relax to non-strict otherwise
    shift = mode is Mode.INT
    g = l if cmp == ">" else neg
    return [aadd(g, AffineForm.of_const(_NEG_ONE))] if shift else [g]


def _max_product(c: Interval, x: Interval):
    return iarith("*", c, x).hi


def _allowed_range(coeff: Interval, m) -> Interval | None:
    """Values ``x`` with ``max(coeff * x) >= m``; None means "don't refine"."""
    pieces = []
    for c in (coeff.lo, coeff.hi):
        if not is_finite(c):
            return None
        if c > 0:
            pieces.append(Interval(bdiv(m, c), POS_INF))
        elif c < 0:
            pieces.append(Interval(NEG_INF, bdiv(m, c)))
        else:
            pieces.append(TOP if m <= 0 else EMPTY)
    out = EMPTY
    for p in pieces:
        out = ijoin(out, p)
    return out


def _refine_once(r: IntervalEnv, g: AffineForm, mode: Mode) -> IntervalEnv:
    vals = list(r.values)
    if intervalize(g, r, mode).hi < 0:
        return IntervalEnv.bottom(r.size)
    for v, c in g.coeffs:
        rest_hi = g.constant.hi
        for w, cw in g.coeffs:
            if w != v:
                rest_hi = rest_hi + _max_product(cw, vals[w.index])
        if rest_hi == POS_INF:
            continue
        allowed = _allowed_range(c, -rest_hi)
        if allowed is None:
            continue
        new = imeet(vals[v.index], allowed)
        if mode is Mode.INT:
            new = new.tighten_int()
        if new.is_empty:
            return IntervalEnv.bottom(r.size)
        vals[v.index] = new
    return IntervalEnv(r.size, tuple(vals))


def test_affine(r: IntervalEnv, l: AffineForm, cmp: str, mode: Mode = Mode.RAT) -> IntervalEnv:
    """Filter ``r`` by ``l cmp 0`` using bound propagation on each variable."""
    if r.is_bottom:
        return r
    if cmp == "!=":
        return r if sign_feasible(intervalize(l, r, mode), "!=", mode) else IntervalEnv.bottom(r.size)
    constraints = _nonneg_constraints(l, cmp, mode)
    for _ in range(MAX_REFINE_ROUNDS):
        before = r
        for g in constraints:
            r = _refine_once(r, g, mode)
            if r.is_bottom:
                return r
        if r == before:
            break
    return r

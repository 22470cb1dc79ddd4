"""Abstraction of arbitrary expressions into interval affine forms.

Multiplications are the only place a choice is made: one side gets
intervalized (evaluated to a constant interval over the current bounds) and
scales the affine form of the other side.  :class:`MultStrategy` decides
which side.
"""

from __future__ import annotations

import itertools
from collections import Counter
from enum import Enum
from fractions import Fraction

from .affine import AffineForm, VarBounds, aadd, adivc, ascale, asub, intervalize
from .interval import Interval, Mode
from .lang import Binop, Const, Expr, Var, VarId, vars_of

MAX_FORMS = 2**8


class MultStrategy(Enum):
    ALL_CASES = "all-cases"
    WIDTH = "width"
    REL_WIDTH = "rel-width"
    SIMPLIFY = "simplify"
    HOMOGENEOUS = "homogeneous"


class TooManyForms(ValueError):
    pass


def expr_degree(e: Expr, intervalized: frozenset[VarId] | set[VarId] = frozenset()) -> int | None:
    """Polynomial degree of ``e`` once ``intervalized`` variables count as
    constants, or None when some ``+``/``-`` mixes degrees."""
    if isinstance(e, Var):
        return 0 if e.var in intervalized else 1
    if isinstance(e, Const):
        return 0
    d1 = expr_degree(e.left, intervalized)
    d2 = expr_degree(e.right, intervalized)
    if d1 is None or d2 is None:
        return None
    if e.op in "+-":
        return d1 if d1 == d2 else None
    if e.op == "*":
        return d1 + d2
    return d1 - d2


def homogenizing_set(e: Expr) -> frozenset[VarId] | None:
    """Smallest variable set (then lowest indices) making ``e`` homogeneous."""
    vs = sorted(vars_of(e))
    for r in range(len(vs) + 1):
        for combo in itertools.combinations(vs, r):
            if expr_degree(e, frozenset(combo)) is not None:
                return frozenset(combo)
    return None


def _occurrences(e: Expr, acc: Counter) -> Counter:
    if isinstance(e, Var):
        acc[e.var] += 1
    elif isinstance(e, Binop):
        _occurrences(e.left, acc)
        _occurrences(e.right, acc)
    return acc


def _size_key(i: Interval, relative: bool):
    if not i.is_bounded:
        return (1, 0)
    w = i.hi - i.lo
    if relative and i.lo + i.hi != 0:
        w = Fraction(w) / abs(i.lo + i.hi)
    return (0, w)


LEFT, RIGHT = 0, 1


class _Linearizer:
    def __init__(self, e: Expr, bounds: VarBounds, strategy: MultStrategy, mode: Mode, refine_trunc: bool):
        self.bounds = bounds
        self.strategy = strategy
        self.mode = mode
        self.refine_trunc = refine_trunc
        self.total = _occurrences(e, Counter())
        self.homog = homogenizing_set(e) if strategy is MultStrategy.HOMOGENEOUS else None

    def iota(self, l: AffineForm) -> Interval:
        return intervalize(l, self.bounds, self.mode)

    def run(self, e: Expr) -> list[AffineForm]:
        if isinstance(e, Var):
            return [AffineForm.of_var(e.var)]
        if isinstance(e, Const):
            c = e.value
            if self.mode is Mode.INT:
                t = c.tighten_int()
                c = c if t.is_empty else t
            return [AffineForm.of_const(c)]
        ls, rs = self.run(e.left), self.run(e.right)
        out: list[AffineForm] = []
        for a in ls:
            for b in rs:
                if e.op == "+":
                    out.append(aadd(a, b))
                elif e.op == "-":
                    out.append(asub(a, b))
                elif e.op == "/":
                    out.append(adivc(a, self.iota(b), self.mode, self.refine_trunc))
                else:
                    out.extend(self.multiply(e, a, b))
        out = list(dict.fromkeys(out))
        if len(out) > MAX_FORMS:
            raise TooManyForms(f"all-cases linearization exceeds {MAX_FORMS} forms")
        return out

    def multiply(self, node: Binop, a: AffineForm, b: AffineForm) -> list[AffineForm]:
        if a.is_constant:
            return [ascale(a.constant, b, self.mode)]
        if b.is_constant:
            return [ascale(b.constant, a, self.mode)]
        ia, ib = self.iota(a), self.iota(b)
        by_left = ascale(ia, b, self.mode)
        by_right = ascale(ib, a, self.mode)
        if self.strategy is MultStrategy.ALL_CASES:
            return [by_left, by_right]
        return [by_left if self.choose(node, ia, ib) == LEFT else by_right]

    def choose(self, node: Binop, ia: Interval, ib: Interval) -> int:
        """Which side of ``node`` to intervalize."""
        # an unbounded side is never preferred over a bounded one
        if ia.is_bounded != ib.is_bounded:
            return LEFT if ia.is_bounded else RIGHT
        if self.strategy is MultStrategy.WIDTH:
            return self.by_width(ia, ib, relative=False)
        if self.strategy is MultStrategy.REL_WIDTH:
            return self.by_width(ia, ib, relative=True)
        if self.strategy is MultStrategy.HOMOGENEOUS and self.homog is not None:
            lv, rv = vars_of(node.left), vars_of(node.right)
            left_in, right_in = lv <= self.homog, rv <= self.homog
            if left_in and not right_in:
                return LEFT
            if right_in and not left_in:
                return RIGHT
        return self.by_sharing(node, ia, ib)

    @staticmethod
    def by_width(ia: Interval, ib: Interval, relative: bool) -> int:
        return RIGHT if _size_key(ib, relative) < _size_key(ia, relative) else LEFT

    def by_sharing(self, node: Binop, ia: Interval, ib: Interval) -> int:
        inside = _occurrences(node, Counter())
        rest = self.total - inside

        def shared(side: Expr) -> int:
            return sum(rest[v] for v in vars_of(side))

        sl, sr = shared(node.left), shared(node.right)
        if sl != sr:
            return LEFT if sl < sr else RIGHT
        return self.by_width(ia, ib, relative=False)


def linearize(
    e: Expr,
    bounds: VarBounds,
    strategy: MultStrategy = MultStrategy.SIMPLIFY,
    mode: Mode = Mode.RAT,
    refine_trunc: bool = True,
) -> list[AffineForm]:
    """Interval affine forms over-approximating ``e`` on the box ``bounds``.

    Every strategy but ``ALL_CASES`` returns exactly one form.
    """
    return _Linearizer(e, bounds, strategy, mode, refine_trunc).run(e)


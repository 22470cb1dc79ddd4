"""Exact interval arithmetic over extended rationals.

Finite bounds are exact rationals: a plain ``int`` when integral, otherwise a
:class:`fractions.Fraction`.  Unbounded ends are the floats ``-inf`` / ``+inf``.
Nothing here ever touches a finite float.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Union

Bound = Union[int, Fraction, float]

NEG_INF: float = -math.inf
POS_INF: float = math.inf
ZERO = 0
ONE = 1


class Mode(Enum):
    """Value set of program variables."""

    INT = "int"
    RAT = "rat"


def to_bound(x) -> Bound:
    """Coerce ints, Fractions, decimal strings and infinities to a bound."""
    if type(x) is int:
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, bool):
        raise TypeError("bool is not a bound")
    if isinstance(x, int):
        return int(x)
    if isinstance(x, float):
        if math.isinf(x):
            return x
        raise TypeError("finite floats are not accepted as exact bounds; use Fraction or str")
    if isinstance(x, str):
        return parse_bound(x)
    raise TypeError(f"cannot make a bound from {x!r}")


def parse_bound(text: str) -> Bound:
    s = text.strip()
    if s in ("-oo", "-inf"):
        return NEG_INF
    if s in ("+oo", "oo", "+inf", "inf"):
        return POS_INF
    return to_bound(Fraction(s))


def is_finite(b: Bound) -> bool:
    # the only float bounds are the two infinities
    return type(b) is not float


def bmul(x: Bound, y: Bound) -> Bound:
    # 0 * inf = 0
    if (type(x) is not float and not x) or (type(y) is not float and not y):
        return ZERO
    return x * y


def bdiv(x: Bound, y: Bound) -> Bound:
    """x / y for y != 0, with q / +-inf = 0."""
    if not is_finite(y):
        if not is_finite(x):
            raise ArithmeticError("inf / inf")
        return ZERO
    if not is_finite(x):
        return x if y > 0 else -x
    return to_bound(Fraction(x) / y)


def format_bound(b: Bound, decimal: bool = True) -> str:
    """Exact text for a bound: ``-oo``, ``+oo``, a terminating decimal, or ``p/q``."""
    if b == NEG_INF:
        return "-oo"
    if b == POS_INF:
        return "+oo"
    if type(b) is int:
        return str(b)
    assert isinstance(b, Fraction)
    if b.denominator == 1:
        return str(b.numerator)
    if decimal:
        dec = _as_decimal(b)
        if dec is not None:
            return dec
    return f"{b.numerator}/{b.denominator}"


def _as_decimal(q: Fraction) -> str | None:
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return None
    digits = max(twos, fives)
    scaled = abs(q.numerator) * (10**digits) // q.denominator
    whole, frac = divmod(scaled, 10**digits)
    sign = "-" if q < 0 else ""
    return f"{sign}{whole}.{str(frac).rjust(digits, '0').rstrip('0')}"


def _canonical(b) -> bool:
    t = type(b)
    if t is int:
        return True
    if t is Fraction:
        return b.denominator != 1
    return t is float and (b == POS_INF or b == NEG_INF)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; the empty interval is :data:`EMPTY`."""

    lo: Bound
    hi: Bound

    def __post_init__(self) -> None:
        lo, hi = self.lo, self.hi
        if not _canonical(lo):
            lo = to_bound(lo)
            object.__setattr__(self, "lo", lo)
        if not _canonical(hi):
            hi = to_bound(hi)
            object.__setattr__(self, "hi", hi)
        lo_inf, hi_inf = type(lo) is float, type(hi) is float
        if lo_inf and hi_inf and lo > 0 and hi < 0:
            return  # EMPTY
        if (lo_inf and lo > 0) or (hi_inf and hi < 0) or (not lo_inf and not hi_inf and lo > hi):
            raise ValueError(f"malformed interval [{lo}, {hi}]")

    @classmethod
    def point(cls, v) -> Interval:
        b = to_bound(v)
        return cls(b, b)

    @classmethod
    def parse(cls, text: str) -> Interval:
        s = text.strip()
        if s == "empty":
            return EMPTY
        m = re.fullmatch(r"\[\s*([^,\]]+?)\s*,\s*([^,\]]+?)\s*\]", s)
        if m is None:
            return cls.point(parse_bound(s))
        return cls(parse_bound(m.group(1)), parse_bound(m.group(2)))

    @property
    def is_empty(self) -> bool:
        lo = self.lo
        return type(lo) is float and lo > 0

    @property
    def is_singleton(self) -> bool:
        return not self.is_empty and self.lo == self.hi

    @property
    def is_bounded(self) -> bool:
        return not self.is_empty and is_finite(self.lo) and is_finite(self.hi)

    @property
    def width(self) -> Bound:
        if self.is_empty:
            return ZERO
        return self.hi - self.lo

    def __contains__(self, v) -> bool:
        return icontains(self, v)

    def tighten_int(self) -> Interval:
        """Shrink to integer bounds: lo rounds up, hi rounds down."""
        if self.is_empty:
            return self
        lo, hi = self.lo, self.hi
        if type(lo) is int and type(hi) is int:
            return self
        lo = math.ceil(lo) if is_finite(lo) else lo
        hi = math.floor(hi) if is_finite(hi) else hi
        if lo > hi:
            return EMPTY
        return Interval(lo, hi)

    def neg(self) -> Interval:
        if self.is_empty:
            return self
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: Interval) -> Interval:
        return iarith("+", self, other)

    def __sub__(self, other: Interval) -> Interval:
        return iarith("-", self, other)

    def __mul__(self, other: Interval) -> Interval:
        return iarith("*", self, other)

    def __str__(self) -> str:
        return format_interval(self)

    def __repr__(self) -> str:
        return f"Interval({format_interval(self, decimal=False)})"


EMPTY = Interval(POS_INF, NEG_INF)
TOP = Interval(NEG_INF, POS_INF)
ZERO_I = Interval(0, 0)
ONE_I = Interval(1, 1)


def format_interval(x: Interval, decimal: bool = True) -> str:
    if x.is_empty:
        return "empty"
    return f"[{format_bound(x.lo, decimal)},{format_bound(x.hi, decimal)}]"


def _hull(values: Iterable[Bound]) -> Interval:
    vs = list(values)
    return Interval(min(vs), max(vs))


def _quotients(x: Interval, y: Interval):
    for a in (x.lo, x.hi):
        for b in (y.lo, y.hi):
            if is_finite(a) or is_finite(b):
                yield bdiv(a, b)
            else:
                # a/b with both unbounded sweeps every value of one sign
                yield ZERO
                yield POS_INF if (a > 0) == (b > 0) else NEG_INF


def iarith(op: str, x: Interval, y: Interval, mode: Mode = Mode.RAT) -> Interval:
    """Classic interval ``+ - * /``.

    Division by an interval holding 0 gives ``[-oo,+oo]``; in integer mode the
    quotient bounds are rounded outward (floor / ceil).
    """
    if x.is_empty or y.is_empty:
        return EMPTY
    if op == "+":
        return Interval(x.lo + y.lo, x.hi + y.hi)
    if op == "-":
        return Interval(x.lo - y.hi, x.hi - y.lo)
    if op == "*":
        a, b, c, d = bmul(x.lo, y.lo), bmul(x.lo, y.hi), bmul(x.hi, y.lo), bmul(x.hi, y.hi)
        return Interval(min(a, b, c, d), max(a, b, c, d))
    if op == "/":
        if y.lo <= 0 <= y.hi:
            return TOP
        q = _hull(_quotients(x, y))
        if mode is Mode.INT:
            lo = math.floor(q.lo) if is_finite(q.lo) else q.lo
            hi = math.ceil(q.hi) if is_finite(q.hi) else q.hi
            return Interval(lo, hi)
        return q
    raise ValueError(f"unknown operator {op!r}")


def ileq(x: Interval, y: Interval) -> bool:
    if x.is_empty:
        return True
    if y.is_empty:
        return False
    return y.lo <= x.lo and x.hi <= y.hi


def ijoin(x: Interval, y: Interval) -> Interval:
    if x.is_empty:
        return y
    if y.is_empty:
        return x
    return Interval(min(x.lo, y.lo), max(x.hi, y.hi))


def imeet(x: Interval, y: Interval) -> Interval:
    if x.is_empty or y.is_empty:
        return EMPTY
    lo, hi = max(x.lo, y.lo), min(x.hi, y.hi)
    if lo > hi:
        return EMPTY
    return Interval(lo, hi)


def iwiden(x: Interval, y: Interval, thresholds: Iterable = ()) -> Interval:
    """Threshold widening: an unstable bound jumps to the nearest enclosing
    threshold, or to infinity when there is none."""
    if x.is_empty:
        return y
    if y.is_empty:
        return x
    ts = sorted(to_bound(t) for t in thresholds)
    lo = x.lo
    if y.lo < x.lo:
        below = [t for t in ts if t <= y.lo]
        lo = below[-1] if below else NEG_INF
    hi = x.hi
    if y.hi > x.hi:
        above = [t for t in ts if t >= y.hi]
        hi = above[0] if above else POS_INF
    return Interval(lo, hi)


def icontains(x: Interval, v) -> bool:
    if x.is_empty:
        return False
    v = to_bound(v)
    return x.lo <= v <= x.hi

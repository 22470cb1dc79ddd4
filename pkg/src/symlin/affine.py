"""Interval affine forms ``i0 + sum_k ik * Vk``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .interval import (
    TOP,
    ZERO_I,
    Interval,
    Mode,
    format_interval,
    iarith,
    is_finite,
)
from .lang import VarId

VarBounds = Mapping[VarId, Interval]


@dataclass(frozen=True)
class AffineForm:
    """Constant interval plus interval coefficients, kept in variable-index
    order with no ``[0,0]`` coefficient stored."""

    constant: Interval
    coeffs: tuple[tuple[VarId, Interval], ...] = ()

    def __post_init__(self) -> None:
        if self.constant.is_empty or any(c.is_empty for _, c in self.coeffs):
            raise ValueError("affine forms cannot hold empty intervals")

    @classmethod
    def make(cls, constant: Interval, coeffs: Mapping[VarId, Interval] | None = None) -> AffineForm:
        items = sorted((v, c) for v, c in (coeffs or {}).items() if c != ZERO_I)
        return cls(constant, tuple(items))

    @classmethod
    def of_const(cls, c: Interval) -> AffineForm:
        return cls(c)

    @classmethod
    def of_var(cls, v: VarId, coeff: Interval = Interval(1, 1)) -> AffineForm:
        return cls.make(ZERO_I, {v: coeff})

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def coeff(self, v: VarId) -> Interval:
        for w, c in self.coeffs:
            if w == v:
                return c
        return ZERO_I

    def coeff_map(self) -> dict[VarId, Interval]:
        return dict(self.coeffs)

    def variables(self) -> tuple[VarId, ...]:
        return tuple(v for v, _ in self.coeffs)

    def __str__(self) -> str:
        parts = [format_interval(self.constant)]
        parts += [f"{format_interval(c)}*{v.name}" for v, c in self.coeffs]
        return " + ".join(parts)


def _pointwise(op: str, l1: AffineForm, l2: AffineForm) -> AffineForm:
    m1, m2 = l1.coeff_map(), l2.coeff_map()
    out = {v: iarith(op, m1.get(v, ZERO_I), m2.get(v, ZERO_I)) for v in m1.keys() | m2.keys()}
    return AffineForm.make(iarith(op, l1.constant, l2.constant), out)


def aadd(l1: AffineForm, l2: AffineForm) -> AffineForm:
    return _pointwise("+", l1, l2)


def asub(l1: AffineForm, l2: AffineForm) -> AffineForm:
    return _pointwise("-", l1, l2)


def ascale(i: Interval, l: AffineForm, mode: Mode = Mode.RAT) -> AffineForm:
    """``i * l``, coefficient-wise (never rounded, so sound in both modes)."""
    if i.is_empty:
        raise ValueError("cannot scale by the empty interval")
    return AffineForm.make(
        iarith("*", i, l.constant), {v: iarith("*", i, c) for v, c in l.coeffs}
    )


def adivc(l: AffineForm, i: Interval, mode: Mode = Mode.RAT, refine_trunc: bool = True) -> AffineForm:
    """``l / i`` for a constant interval divisor.

    In integer mode the quotient is either computed over the rationals and
    widened by the truncation slack ``[-1+x, 1-x]`` (``refine_trunc``), or
    every coefficient is rounded outward to integer bounds.
    """
    if i.is_empty:
        raise ValueError("cannot divide by the empty interval")
    if i.lo <= 0 <= i.hi:
        return AffineForm.make(TOP, {v: TOP for v, _ in l.coeffs})
    if mode is Mode.RAT:
        return _divide(l, i, Mode.RAT)
    lo_mag = min(abs(i.lo), abs(i.hi))
    if refine_trunc and lo_mag >= 1:
        hi_mag = max(abs(i.lo), abs(i.hi))
        # truncating p/y for integers p, y moves it by at most 1 - 1/|y|
        x = Fraction(1) / hi_mag if is_finite(hi_mag) else Fraction(0)
        return aadd(_divide(l, i, Mode.RAT), AffineForm(Interval(-1 + x, 1 - x)))
    return _divide(l, i, Mode.INT)


def _divide(l: AffineForm, i: Interval, mode: Mode) -> AffineForm:
    return AffineForm.make(
        iarith("/", l.constant, i, mode), {v: iarith("/", c, i, mode) for v, c in l.coeffs}
    )


def intervalize(l: AffineForm, bounds: VarBounds, mode: Mode = Mode.RAT) -> Interval:
    """Evaluate ``l`` with interval arithmetic over the variable bounds."""
    acc = l.constant
    for v, c in l.coeffs:
        acc = iarith("+", acc, iarith("*", c, bounds[v]))
    if mode is Mode.INT and not acc.is_empty:
        tight = acc.tighten_int()
        # an empty tightening means no integer value; keep the rational hull
        return acc if tight.is_empty else tight
    return acc


def quasi_linearize(l: AffineForm, bounds: VarBounds) -> AffineForm:
    """Replace each coefficient ``[a,b]`` by its midpoint, moving the slack
    ``[(a-b)/2, (b-a)/2] * bound`` into the constant.  Rational mode only."""
    const = l.constant
    mids = {}
    for v, c in l.coeffs:
        if not c.is_bounded:
            raise ValueError(f"coefficient of {v.name} is unbounded: {c}")
        half = Fraction(c.hi - c.lo, 2)
        mids[v] = Interval.point(Fraction(c.lo + c.hi, 2))
        if half:
            const = iarith("+", const, iarith("*", Interval(-half, half), bounds[v]))
    return AffineForm.make(const, mids)


def aeval(l: AffineForm, rho: Mapping[VarId, object]) -> Interval:
    """Value set of ``l`` at a concrete point."""
    acc = l.constant
    for v, c in l.coeffs:
        acc = iarith("+", acc, iarith("*", c, Interval.point(rho[v])))
    return acc


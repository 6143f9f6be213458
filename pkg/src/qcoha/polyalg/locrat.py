"""Rational functions whose denominators are products of cross-slot differences."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from fractions import Fraction

from .poly import Alphabet, MPoly, exact_divide, format_poly


class LocalisationError(ValueError):
    pass


DenKey = tuple[int, int]


def difference(alphabet: Alphabet, a: int, b: int) -> tuple[int, DenKey]:
    """Write x_a - x_b as sign * (x_u - x_v) with u < v; returns (sign, (u, v))."""
    if a == b:
        raise LocalisationError("difference of a variable with itself")
    return (1, (a, b)) if a < b else (-1, (b, a))


class LocRat:
    """``num / prod (x_u - x_v)^m`` with u < v in different slots.

    Canonical form keeps every factor as (smaller slot minus larger slot);
    :meth:`canonical` also strips factors that divide the numerator.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: Mapping[DenKey, int] | None = None):
        self.num = num
        clean = {}
        for (u, v), m in (den or {}).items():
            if m < 0:
                raise LocalisationError("negative multiplicity in denominator")
            if m == 0:
                continue
            if not u < v:
                raise LocalisationError(f"denominator key {(u, v)} is not ordered")
            if num.alphabet.slot_of(u) == num.alphabet.slot_of(v):
                raise LocalisationError(
                    f"same-slot difference {num.alphabet.name(u)} - {num.alphabet.name(v)} in a denominator")
            clean[(u, v)] = m
        self.den = clean

    @property
    def alphabet(self) -> Alphabet:
        return self.num.alphabet

    @classmethod
    def poly(cls, p: MPoly) -> LocRat:
        return cls(p, {})

    @classmethod
    def linear_power(cls, alphabet: Alphabet, a: int, b: int, e: int) -> LocRat:
        """(x_a - x_b)^e for any integer e."""
        gens = alphabet.ctx.gens()
        if e >= 0:
            return cls(MPoly(alphabet, (gens[a] - gens[b]) ** e))
        sign, key = difference(alphabet, a, b)
        return cls(MPoly.constant(alphabet, sign ** (-e)), {key: -e})

    def den_poly(self) -> MPoly:
        gens = self.alphabet.ctx.gens()
        raw = self.alphabet.ctx.constant(1)
        for (u, v), m in sorted(self.den.items()):
            raw = raw * (gens[u] - gens[v]) ** m
        return MPoly(self.alphabet, raw)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.canonical().den

    # arithmetic
    def __mul__(self, other) -> LocRat:
        if isinstance(other, LocRat):
            den = dict(self.den)
            for k, m in other.den.items():
                den[k] = den.get(k, 0) + m
            return LocRat(self.num * other.num, den)
        if isinstance(other, (MPoly, int, Fraction)):
            return LocRat(self.num * other, self.den)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self) -> LocRat:
        return LocRat(-self.num, self.den)

    def _lift(self, den: Mapping[DenKey, int]) -> MPoly:
        """Numerator over the (larger) denominator ``den``."""
        gens = self.alphabet.ctx.gens()
        raw = self.num.raw
        for (u, v), m in den.items():
            extra = m - self.den.get((u, v), 0)
            if extra < 0:
                raise LocalisationError("target denominator is too small")
            if extra:
                raw = raw * (gens[u] - gens[v]) ** extra
        return MPoly(self.alphabet, raw)

    def __add__(self, other) -> LocRat:
        if isinstance(other, (MPoly, int, Fraction)):
            other = LocRat(other if isinstance(other, MPoly) else MPoly.constant(self.alphabet, other))
        if not isinstance(other, LocRat):
            return NotImplemented
        if other.alphabet != self.alphabet:
            raise LocalisationError("alphabet mismatch")
        den = dict(self.den)
        for k, m in other.den.items():
            den[k] = max(den.get(k, 0), m)
        return LocRat(self._lift(den) + other._lift(den), den)

    __radd__ = __add__

    def __sub__(self, other) -> LocRat:
        return self + (-other)

    def permute(self, perm: Sequence[int]) -> LocRat:
        num = self.num.permute(perm)
        den: dict[DenKey, int] = {}
        for (u, v), m in self.den.items():
            sign, key = difference(self.alphabet, perm[u], perm[v])
            if sign < 0 and m % 2:
                num = -num
            den[key] = den.get(key, 0) + m
        return LocRat(num, den)

    def rename(self, mapping: Sequence[int], target: Alphabet) -> LocRat:
        """Relabel variables into another alphabet (generator k -> mapping[k])."""
        num = self.num.rename(mapping, target)
        den: dict[DenKey, int] = {}
        for (u, v), m in self.den.items():
            sign, key = difference(target, mapping[u], mapping[v])
            if sign < 0 and m % 2:
                num = -num
            den[key] = den.get(key, 0) + m
        return LocRat(num, den)

    def canonical(self) -> LocRat:
        """Cancel linear factors that divide the numerator."""
        if self.num.is_zero():
            return LocRat(self.num, {})
        gens = self.alphabet.ctx.gens()
        num = self.num.raw
        den = {}
        for (u, v), m in sorted(self.den.items()):
            lin = gens[u] - gens[v]
            while m:
                q, r = divmod(num, lin)
                if not r.is_zero():
                    break
                num, m = q, m - 1
            if m:
                den[(u, v)] = m
        return LocRat(MPoly(self.alphabet, num), den)

    def divide_poly(self, p: MPoly) -> LocRat:
        """Exact division of the numerator by a polynomial coprime to the denominator."""
        return LocRat(exact_divide(self.num, p), self.den)

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            other = LocRat(other)
        if not isinstance(other, LocRat):
            return NotImplemented
        if other.alphabet != self.alphabet:
            return False
        den = dict(self.den)
        for k, m in other.den.items():
            den[k] = max(den.get(k, 0), m)
        return self._lift(den) == other._lift(den)

    __hash__ = None

    def evaluate(self, point: Sequence) -> Fraction:
        d = self.den_poly().evaluate(point)
        if d == 0:
            raise ZeroDivisionError("evaluation point lies on a denominator hyperplane")
        return self.num.evaluate(point) / d

    def den_text(self) -> str:
        a = self.alphabet
        parts = []
        for (u, v), m in sorted(self.den.items()):
            f = f"({a.name(u)} - {a.name(v)})"
            parts.append(f + (f"^{m}" if m > 1 else ""))
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.den:
            return format_poly(self.num)
        return f"({format_poly(self.num)}) / ({self.den_text()})"

    def __repr__(self) -> str:
        return f"LocRat({self})"

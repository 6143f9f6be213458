"""Truncated Laurent series in t and series graded by dimension vectors."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from ..quiver import DimVector

INF = float("inf")


def _clean(coeffs: Mapping[int, object], order) -> dict[int, Fraction]:
    return {e: Fraction(c) for e, c in coeffs.items() if c and e <= order}


class LaurentSeries:
    """Coefficients c_e t^e known for every e <= ``order``; above that nothing is known.

    ``order`` may be ``inf`` for exact Laurent polynomials.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Mapping[int, object] | None = None, order=INF):
        self.order = order
        self.coeffs = _clean(coeffs or {}, order)

    @classmethod
    def monomial(cls, e: int, c=1, order=INF) -> LaurentSeries:
        return cls({e: c}, order)

    @classmethod
    def geometric(cls, step: int, order: int, start: int = 0) -> LaurentSeries:
        """t^start / (1 - t^step) for step > 0, truncated at ``order``."""
        if step <= 0 or order == INF:
            raise ValueError("geometric series need a positive step and a finite order")
        return cls({e: 1 for e in range(start, int(order) + 1, step)}, order)

    def valuation(self):
        return min(self.coeffs) if self.coeffs else INF

    def degree(self):
        return max(self.coeffs) if self.coeffs else -INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, e: int) -> Fraction:
        if e > self.order:
            raise KeyError(f"coefficient of t^{e} lies beyond the truncation order {self.order}")
        return self.coeffs.get(e, Fraction(0))

    def truncate(self, order) -> LaurentSeries:
        return LaurentSeries(self.coeffs, min(order, self.order))

    def __add__(self, other) -> LaurentSeries:
        other = _as_series(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentSeries(out, order)

    __radd__ = __add__

    def __neg__(self) -> LaurentSeries:
        return LaurentSeries({e: -c for e, c in self.coeffs.items()}, self.order)

    def __sub__(self, other) -> LaurentSeries:
        return self + (-_as_series(other))

    def __rsub__(self, other) -> LaurentSeries:
        return _as_series(other) - self

    def __mul__(self, other) -> LaurentSeries:
        other = _as_series(other)
        # known up to min(order_a + low_b, order_b + low_a)
        order = min(self.order + other._low(), other.order + self._low())
        out: dict[int, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e <= order:
                    out[e] = out.get(e, 0) + c1 * c2
        return LaurentSeries(out, order)

    def _low(self):
        """Lowest exponent that can carry a nonzero coefficient, known or not."""
        return min(self.coeffs) if self.coeffs else self.order + 1

    __rmul__ = __mul__

    def shift(self, k: int) -> LaurentSeries:
        """Multiply by t^k."""
        return LaurentSeries({e + k: c for e, c in self.coeffs.items()}, self.order + k)

    def substitute_sign(self) -> LaurentSeries:
        """t -> -t."""
        return LaurentSeries({e: (-c if e % 2 else c) for e, c in self.coeffs.items()}, self.order)

    def __eq__(self, other) -> bool:
        other = _as_series(other)
        order = min(self.order, other.order)
        a = {e: c for e, c in self.coeffs.items() if e <= order}
        b = {e: c for e, c in other.coeffs.items() if e <= order}
        return a == b

    __hash__ = None

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs.values())

    def to_json(self) -> dict:
        return {"terms": [[e, _fmt(c)] for e, c in sorted(self.coeffs.items())],
                "order": None if self.order == INF else int(self.order)}

    def __str__(self) -> str:
        text = format_laurent(self.coeffs)
        if self.order != INF:
            text += f" + O(t^{int(self.order) + 1})"
        return text

    def __repr__(self) -> str:
        return f"LaurentSeries({self})"


def _as_series(x) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    return LaurentSeries({0: x} if x else {}, INF)


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_laurent(coeffs: Mapping[int, Fraction], var: str = "t") -> str:
    """Sorted Laurent monomials, lowest exponent first."""
    items = [(e, c) for e, c in sorted(coeffs.items()) if c]
    if not items:
        return "0"
    out = []
    for n, (e, c) in enumerate(items):
        mag = abs(c)
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        if not mono:
            body = _fmt(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt(mag)}*{mono}"
        if n == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def box(bound: DimVector) -> list[DimVector]:
    """All dimension vectors <= bound, ordered by total dimension then lexicographically."""
    from itertools import product
    dims = [DimVector(c) for c in product(*(range(b + 1) for b in bound))]
    return sorted(dims, key=lambda g: (g.total, g.counts))


@dataclass
class GradedSeries:
    """Map from dimension vectors (inside the box ``bound``) to Laurent series."""

    bound: DimVector
    entries: dict[DimVector, LaurentSeries] = field(default_factory=dict)

    def __getitem__(self, g: DimVector) -> LaurentSeries:
        if not g <= self.bound:
            raise KeyError(f"{g} lies outside the truncation box {self.bound}")
        return self.entries.get(g, LaurentSeries({}, self.order_at(g)))

    def order_at(self, g: DimVector):
        s = self.entries.get(g)
        return s.order if s is not None else INF

    def __setitem__(self, g: DimVector, s: LaurentSeries) -> None:
        if not g <= self.bound:
            raise KeyError(f"{g} lies outside the truncation box {self.bound}")
        self.entries[g] = s

    def dims(self) -> list[DimVector]:
        return box(self.bound)

    def support(self) -> Iterable[DimVector]:
        return [g for g in self.dims() if g in self.entries and not self.entries[g].is_zero()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedSeries) or self.bound != other.bound:
            return NotImplemented
        return all(self[g] == other[g] for g in self.dims())

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction


class InconsistentData(ValueError):
    """The points are not the values of a polynomial of the claimed degree."""


@dataclass(frozen=True)
class UPoly:
    """Univariate polynomial over Q, coefficients low degree first, no trailing zeros."""

    coeffs: tuple[Fraction, ...]
    var: str = "q"

    @classmethod
    def of(cls, coeffs: Iterable, var: str = "q") -> UPoly:
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs), var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __str__(self) -> str:
        from .series import format_laurent
        terms = [(e, c) for e, c in enumerate(self.coeffs) if c]
        if not terms:
            return "0"
        pieces = []
        for n, (e, c) in enumerate(reversed(terms)):
            body = format_laurent({e: abs(c)}, self.var)
            pieces.append(("-" if c < 0 else "") + body if n == 0 else (" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def interpolate(points: Sequence[tuple[int, object]], degree_bound: int, var: str = "q",
                integral: bool = False) -> UPoly:
    """Unique polynomial of degree <= ``degree_bound`` through all points.

    The first ``degree_bound + 1`` points determine it; any further points must
    lie on it, otherwise :class:`InconsistentData` is raised.  With
    ``integral=True`` a non-integer coefficient is also inconsistent (counting
    polynomials of polynomial-count varieties are integral).
    """
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    if len(pts) < degree_bound + 1:
        raise ValueError(f"need at least {degree_bound + 1} points for degree {degree_bound}, got {len(pts)}")
    base, extra = pts[:degree_bound + 1], pts[degree_bound + 1:]
    # Newton divided differences
    n = len(base)
    table = [y for _, y in base]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (base[i][0] - base[i - j][0])
    # expand Newton form into monomial coefficients
    poly = [Fraction(0)]
    for k in range(n - 1, -1, -1):
        # poly = poly * (x - x_k) + table[k]
        shifted = [Fraction(0)] + poly
        for i in range(len(poly)):
            shifted[i] -= base[k][0] * poly[i]
        shifted[0] += table[k]
        poly = shifted
    result = UPoly.of(poly, var)
    if integral and not result.is_integral():
        raise InconsistentData(f"interpolant {result} has non-integer coefficients")
    for x, y in extra:
        if result(x) != y:
            raise InconsistentData(
                f"value at {x} is {y}, but the degree-{degree_bound} interpolant predicts {result(x)}")
    return result

"""Multivariate polynomials over Q in slot/vertex/index structured variables.

Arithmetic is delegated to FLINT's ``fmpq_mpoly``; this module owns the
variable bookkeeping (which generator is ``x[c][i,k]``), the canonical text
form, and the symmetry helpers.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import permutations, product

import flint

from ..quiver import DimVector


class NotDivisible(ArithmeticError):
    """Exact division failed; ``remainder`` is kept for diagnostics."""

    def __init__(self, message: str, remainder=None):
        super().__init__(message)
        self.remainder = remainder


@lru_cache(maxsize=None)
def _ctx(nvars: int):
    return flint.fmpq_mpoly_ctx.get(("x", nvars), "deglex")


def to_fraction(c) -> Fraction:
    if isinstance(c, flint.fmpq):
        return Fraction(int(c.p), int(c.q))
    return Fraction(c)


def to_fmpq(c):
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


@dataclass(frozen=True, order=True)
class Variable:
    slot: int
    vertex: int
    index: int


@dataclass(frozen=True)
class Alphabet:
    """Variables x[c][i,k] for slots c = 1..r, ordered slot, vertex, index."""

    vertices: tuple[str, ...]
    slots: tuple[DimVector, ...]

    @classmethod
    def single(cls, vertices: Sequence[str], g: DimVector) -> Alphabet:
        return cls(tuple(vertices), (g,))

    @cached_property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(Variable(c, i, k)
                     for c, g in enumerate(self.slots, start=1)
                     for i in range(len(self.vertices))
                     for k in range(1, g[i] + 1))

    @cached_property
    def _offsets(self) -> dict[tuple[int, int], int]:
        out, pos = {}, 0
        for c, g in enumerate(self.slots, start=1):
            for i in range(len(self.vertices)):
                out[(c, i)] = pos
                pos += g[i]
        return out

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def ctx(self):
        return _ctx(self.nvars)

    def index(self, slot: int, vertex: int, k: int) -> int:
        """Generator position of x[slot][vertex, k] (k is 1-based)."""
        if not 1 <= k <= self.slots[slot - 1][vertex]:
            raise IndexError(f"x[{slot}][{self.vertices[vertex]},{k}] not in alphabet")
        return self._offsets[(slot, vertex)] + k - 1

    def group(self, slot: int, vertex: int) -> range:
        start = self._offsets[(slot, vertex)]
        return range(start, start + self.slots[slot - 1][vertex])

    def groups(self) -> list[range]:
        return [self.group(c, i) for c in range(1, len(self.slots) + 1)
                for i in range(len(self.vertices))]

    def slot_of(self, pos: int) -> int:
        return self.variables[pos].slot

    def name(self, pos: int) -> str:
        v = self.variables[pos]
        return f"x[{v.slot}][{self.vertices[v.vertex]},{v.index}]"

    def group_order(self) -> int:
        from math import factorial
        out = 1
        for g in self.groups():
            out *= factorial(len(g))
        return out


class MPoly:
    """Polynomial over an explicit :class:`Alphabet`; immutable by convention."""

    __slots__ = ("alphabet", "raw")

    def __init__(self, alphabet: Alphabet, raw=None):
        self.alphabet = alphabet
        self.raw = alphabet.ctx.constant(0) if raw is None else raw

    # construction
    @classmethod
    def constant(cls, alphabet: Alphabet, c=1) -> MPoly:
        return cls(alphabet, alphabet.ctx.constant(to_fmpq(c)))

    @classmethod
    def var(cls, alphabet: Alphabet, slot: int, vertex: int, k: int) -> MPoly:
        return cls(alphabet, alphabet.ctx.gen(alphabet.index(slot, vertex, k)))

    @classmethod
    def gen(cls, alphabet: Alphabet, pos: int) -> MPoly:
        return cls(alphabet, alphabet.ctx.gen(pos))

    @classmethod
    def from_terms(cls, alphabet: Alphabet, terms: dict) -> MPoly:
        return cls(alphabet, alphabet.ctx.from_dict({tuple(e): to_fmpq(c) for e, c in terms.items() if c}))

    def _wrap(self, raw) -> MPoly:
        return MPoly(self.alphabet, raw)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.alphabet != self.alphabet:
                raise ValueError("alphabet mismatch")
            return other.raw
        if isinstance(other, (int, Fraction)):
            return to_fmpq(other)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.raw + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.raw - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self.raw)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.raw * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.raw)

    def __pow__(self, k: int):
        return self._wrap(self.raw ** k)

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self.alphabet == other.alphabet and self.raw == other.raw
        if isinstance(other, (int, Fraction)):
            return self.raw == self.alphabet.ctx.constant(to_fmpq(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.alphabet, str(self.raw)))

    def is_zero(self) -> bool:
        return self.raw.is_zero()

    def __bool__(self) -> bool:
        return not self.raw.is_zero()

    def __len__(self) -> int:
        return len(self.raw)

    # inspection
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {e: to_fraction(c) for e, c in self.raw.to_dict().items()}

    def degrees(self) -> set[int]:
        """Total degrees of the monomials that occur."""
        return {sum(e) for e in self.raw.monoms()}

    def total_degree(self) -> int:
        return int(self.raw.total_degree())

    def is_constant(self) -> bool:
        return self.raw.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return to_fraction(self.raw.coefficient(0)) if len(self.raw) else Fraction(0)

    def homogeneous_part(self, d: int) -> MPoly:
        return MPoly(self.alphabet, self.alphabet.ctx.from_dict(
            {e: c for e, c in self.raw.to_dict().items() if sum(e) == d}))

    # variable maps
    def substitute(self, images: Sequence[MPoly], target: Alphabet) -> MPoly:
        """Replace generator k by ``images[k]`` (polynomials over ``target``)."""
        if self.alphabet.nvars == 0:
            return MPoly(target, target.ctx.from_dict({(0,) * target.nvars: c for _, c in self.raw.to_dict().items()}))
        return MPoly(target, self.raw.compose(*(im.raw for im in images), ctx=target.ctx))

    def rename(self, mapping: Sequence[int], target: Alphabet | None = None) -> MPoly:
        """Send generator k to generator ``mapping[k]`` of ``target`` (default: same alphabet)."""
        target = target or self.alphabet
        n = target.nvars
        out = {}
        for e, c in self.raw.to_dict().items():
            new = [0] * n
            for k, ek in enumerate(e):
                if ek:
                    new[mapping[k]] += ek
            out[tuple(new)] = c
        return MPoly(target, target.ctx.from_dict(out))

    def permute(self, perm: Sequence[int]) -> MPoly:
        """Apply the variable permutation k -> perm[k] (same alphabet)."""
        if self.alphabet.nvars == 0:
            return self
        gens = self.alphabet.ctx.gens()
        return self._wrap(self.raw.compose(*(gens[p] for p in perm)))

    def evaluate(self, point: Sequence) -> Fraction:
        vals = [to_fmpq(v) for v in point]
        if self.alphabet.nvars == 0:
            return self.constant_value() if len(self.raw) else Fraction(0)
        return to_fraction(self.raw(*vals))

    # printing
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"MPoly({format_poly(self)!s})"


def _monomial_key(e: tuple[int, ...]):
    # graded lex, x[1][.,1] biggest: sort descending by (degree, exponents)
    return (sum(e), e)


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: MPoly) -> str:
    terms = sorted(p.terms().items(), key=lambda kv: _monomial_key(kv[0]), reverse=True)
    if not terms:
        return "0"
    pieces = []
    for n, (e, c) in enumerate(terms):
        mono = "*".join(p.alphabet.name(k) + (f"^{ek}" if ek > 1 else "")
                        for k, ek in enumerate(e) if ek)
        mag = abs(c)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        if n == 0:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


def poly_to_json(p: MPoly) -> list[list]:
    terms = sorted(p.terms().items(), key=lambda kv: _monomial_key(kv[0]), reverse=True)
    return [[format_rational(c), {p.alphabet.name(k): ek for k, ek in enumerate(e) if ek}] for e, c in terms]


# -- symmetry -------------------------------------------------------------------

def _group_generators(alphabet: Alphabet) -> list[list[int]]:
    n = alphabet.nvars
    gens = []
    for grp in alphabet.groups():
        if len(grp) < 2:
            continue
        idx = list(grp)
        swap = list(range(n))
        swap[idx[0]], swap[idx[1]] = idx[1], idx[0]
        gens.append(swap)
        if len(idx) > 2:
            cyc = list(range(n))
            for a, b in zip(idx, idx[1:] + idx[:1]):
                cyc[a] = b
            gens.append(cyc)
    return gens


def sym_check(p: MPoly) -> bool:
    """Invariance under every within-group permutation (checked on a transposition and a cycle per group)."""
    return all(p.permute(g) == p for g in _group_generators(p.alphabet))


def group_elements(alphabet: Alphabet):
    """All permutations in the product of the per-(slot, vertex) symmetric groups."""
    n = alphabet.nvars
    per_group = [[(list(grp), perm) for perm in permutations(grp)] for grp in alphabet.groups() if len(grp) > 1]
    for choice in product(*per_group):
        perm = list(range(n))
        for src, img in choice:
            for a, b in zip(src, img):
                perm[a] = b
        yield perm


def symmetrize(p: MPoly, average: bool = False) -> SymPoly:
    total = MPoly(p.alphabet)
    for perm in group_elements(p.alphabet):
        total = total + p.permute(perm)
    if average:
        total = total * Fraction(1, p.alphabet.group_order())
    return SymPoly(total.alphabet, total.raw, check=False)


class SymPoly(MPoly):
    """An :class:`MPoly` invariant under the grouped symmetric group of its alphabet."""

    __slots__ = ()

    def __init__(self, alphabet: Alphabet, raw=None, check: bool = True):
        super().__init__(alphabet, raw)
        if check and not sym_check(self):
            raise ValueError("polynomial is not symmetric in its variable groups")

    @classmethod
    def of(cls, p: MPoly, check: bool = True) -> SymPoly:
        return cls(p.alphabet, p.raw, check=check)

    def _wrap(self, raw) -> MPoly:
        return MPoly(self.alphabet, raw)


def exact_divide(p: MPoly, q: MPoly) -> MPoly:
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return MPoly(p.alphabet)
    quo, rem = divmod(p.raw, q._coerce(q))
    if not rem.is_zero():
        raise NotDivisible(f"{format_poly(q)} does not divide the dividend", MPoly(p.alphabet, rem))
    return MPoly(p.alphabet, quo)


def power_sum(alphabet: Alphabet, slot: int, vertex: int, k: int) -> MPoly:
    out = MPoly(alphabet)
    for pos in alphabet.group(slot, vertex):
        out = out + MPoly.gen(alphabet, pos) ** k
    return out


def vandermonde(alphabet: Alphabet, positions: Iterable[int]) -> MPoly:
    """prod_{u<v} (x_v - x_u) over the given generator positions (in order)."""
    pos = list(positions)
    out = MPoly.constant(alphabet)
    gens = alphabet.ctx.gens()
    raw = out.raw
    for a in range(len(pos)):
        for b in range(a + 1, len(pos)):
            raw = raw * (gens[pos[b]] - gens[pos[a]])
    return MPoly(alphabet, raw)

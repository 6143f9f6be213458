"""The W = 0 cohomological Hall algebra as a shuffle algebra.

An element of degree gamma is a polynomial in x[1][i,k] (1 <= k <= gamma(i)),
symmetric in each vertex group.  The product symmetrises

    f1(first block) * f2(second block) * prod (x_{j,beta} - x_{i,alpha})^(-b_ij)

over shuffles.  Negative exponents only occur on the diagonal at loop-free
vertices (b_ii = 1), so every shuffle term shares the denominator given by the
full Vandermonde product at those vertices; terms are brought over it, summed
with signs, and divided exactly once.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from itertools import combinations, product
from math import comb

from .polyalg import Alphabet, LocRat, MPoly, SymPoly, exact_divide, format_poly
from .quiver import DimVector, Quiver, b_matrix, chi


@dataclass(frozen=True)
class CohaElem:
    quiver: Quiver
    gamma: DimVector
    poly: SymPoly

    def __post_init__(self):
        if self.poly.alphabet != alphabet_of(self.quiver, self.gamma):
            raise ValueError(f"polynomial alphabet does not match dimension vector {self.gamma}")

    @classmethod
    def of(cls, q: Quiver, gamma, poly: MPoly | int = 1) -> CohaElem:
        g = q.dim(gamma)
        alph = alphabet_of(q, g)
        if not isinstance(poly, MPoly):
            poly = MPoly.constant(alph, poly)
        return cls(q, g, SymPoly.of(poly))

    @classmethod
    def one(cls, q: Quiver, gamma=None) -> CohaElem:
        return cls.of(q, q.zero() if gamma is None else gamma, 1)

    @property
    def alphabet(self) -> Alphabet:
        return self.poly.alphabet

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __add__(self, other: CohaElem) -> CohaElem:
        self._same_space(other)
        return CohaElem(self.quiver, self.gamma, SymPoly.of(self.poly + other.poly, check=False))

    def __sub__(self, other: CohaElem) -> CohaElem:
        self._same_space(other)
        return CohaElem(self.quiver, self.gamma, SymPoly.of(self.poly - other.poly, check=False))

    def __neg__(self) -> CohaElem:
        return CohaElem(self.quiver, self.gamma, SymPoly.of(-self.poly, check=False))

    def scale(self, c) -> CohaElem:
        return CohaElem(self.quiver, self.gamma, SymPoly.of(self.poly * c, check=False))

    def __mul__(self, other: CohaElem) -> CohaElem:
        return shuffle_mul(self, other)

    def _same_space(self, other: CohaElem) -> None:
        if self.quiver != other.quiver or self.gamma != other.gamma:
            raise ValueError("elements live in different graded pieces")

    def __eq__(self, other) -> bool:
        return (isinstance(other, CohaElem) and self.quiver == other.quiver
                and self.gamma == other.gamma and self.poly == other.poly)

    def __hash__(self):
        return hash((self.gamma, self.poly))

    def __str__(self) -> str:
        return format_poly(self.poly)


class CohaSum(dict):
    """Finite formal sum of elements, at most one per dimension vector."""

    @classmethod
    def of(cls, elems: Iterable[CohaElem]) -> CohaSum:
        out = cls()
        for e in elems:
            out.add(e)
        return out

    def add(self, e: CohaElem) -> None:
        if e.gamma in self:
            e = self[e.gamma] + e
        if e.is_zero():
            self.pop(e.gamma, None)
        else:
            self[e.gamma] = e

    def __mul__(self, other: CohaSum) -> CohaSum:
        out = CohaSum()
        for a in self.values():
            for b in other.values():
                out.add(shuffle_mul(a, b))
        return out


def alphabet_of(q: Quiver, g: DimVector) -> Alphabet:
    return Alphabet.single(q.vertices, g)


def shuffles(g1: DimVector, g2: DimVector) -> list[tuple[tuple[int, ...], ...]]:
    """P(g1, g2): per-vertex permutations (0-based images) keeping both blocks in order.

    ``pi[i][p]`` is the variable index at vertex i that receives position p, so
    f1 is evaluated at ``pi[i][:g1(i)]`` and f2 at ``pi[i][g1(i):]``.
    """
    per_vertex = []
    for a, b in zip(g1, g2):
        n = a + b
        opts = []
        for first in combinations(range(n), a):
            chosen = set(first)
            opts.append(tuple(first) + tuple(k for k in range(n) if k not in chosen))
        per_vertex.append(opts)
    out = list(product(*per_vertex))
    assert len(out) == _shuffle_count(g1, g2)
    return out


def _shuffle_count(g1: DimVector, g2: DimVector) -> int:
    n = 1
    for a, b in zip(g1, g2):
        n *= comb(a + b, a)
    return n


def _perm_sign(perm: tuple[int, ...]) -> int:
    inv = sum(1 for x in range(len(perm)) for y in range(x + 1, len(perm)) if perm[x] > perm[y])
    return -1 if inv % 2 else 1


def kernel_exponent_check(q: Quiver) -> list[list[int]]:
    b = b_matrix(q)
    for i in range(q.n):
        for j in range(q.n):
            if i != j and b[i][j] > 0:
                raise AssertionError("off-diagonal b_ij > 0 cannot occur")
    return b


def _positive_kernel(q: Quiver, alph: Alphabet, first: dict, second: dict, b) -> object:
    """prod over (alpha in first at i, beta in second at j) of (x_beta - x_alpha)^(-b_ij), for -b_ij > 0."""
    gens = alph.ctx.gens()
    raw = alph.ctx.constant(1)
    for i in range(q.n):
        for j in range(q.n):
            e = -b[i][j]
            if e <= 0:
                continue
            for a in first[i]:
                for bb in second[j]:
                    raw = raw * (gens[bb] - gens[a]) ** e
    return raw


def _loop_free(q: Quiver) -> list[int]:
    b = kernel_exponent_check(q)
    return [i for i in range(q.n) if b[i][i] > 0]


def _vandermonde_raw(alph: Alphabet, positions) -> object:
    gens = alph.ctx.gens()
    raw = alph.ctx.constant(1)
    pos = list(positions)
    for u in range(len(pos)):
        for v in range(u + 1, len(pos)):
            raw = raw * (gens[pos[v]] - gens[pos[u]])
    return raw


def shuffle_mul(f1: CohaElem, f2: CohaElem) -> CohaElem:
    if f1.quiver != f2.quiver:
        raise ValueError("factors live over different quivers")
    q = f1.quiver
    g1, g2 = f1.gamma, f2.gamma
    if g2.is_zero():
        return f1.scale(f2.poly.constant_value())
    if g1.is_zero():
        return f2.scale(f1.poly.constant_value())
    g = g1 + g2
    alph = alphabet_of(q, g)
    b = kernel_exponent_check(q)
    loop_free = _loop_free(q)
    total = _shuffle_sum(q, alph, f1.poly, f2.poly, g1, g2, b, loop_free)
    denom = alph.ctx.constant(1)
    for i in loop_free:
        denom = denom * _vandermonde_raw(alph, alph.group(1, i))
    result = exact_divide(MPoly(alph, total), MPoly(alph, denom))
    return CohaElem(q, g, SymPoly.of(result, check=False))


def _shuffle_sum(q: Quiver, alph: Alphabet, p1: MPoly, p2: MPoly, g1: DimVector, g2: DimVector,
                 b, loop_free, slot: int = 1):
    """Signed sum over shuffles of f1(first) f2(second) K(first, second) V(first) V(second).

    Each term is rebuilt from its factors; multiplying in flint is far cheaper
    than substituting variables into the expanded product.
    """
    total = alph.ctx.constant(0)
    for pi in shuffles(g1, g2):
        sign = 1
        first, second = {}, {}
        for i, images in enumerate(pi):
            grp = alph.group(slot, i)
            first[i] = [grp[k] for k in images[:g1[i]]]
            second[i] = [grp[k] for k in images[g1[i]:]]
            if i in loop_free:
                sign *= _perm_sign(images)
        fmap = [first[i][k] for i in range(q.n) for k in range(g1[i])]
        smap = [second[i][k] for i in range(q.n) for k in range(g2[i])]
        term = p1.rename(fmap, alph).raw * p2.rename(smap, alph).raw
        term = term * _positive_kernel(q, alph, first, second, b)
        for i in loop_free:
            term = term * _vandermonde_raw(alph, first[i]) * _vandermonde_raw(alph, second[i])
        total = total + term if sign > 0 else total - term
    return total


def torus_mul_unsym(f1: CohaElem, f2: CohaElem) -> LocRat:
    """The identity-shuffle term, as a LocRat.

    The first block is slot 1 and the second block is slot 2 of the returned
    alphabet, so x[2][i,k] stands for x_{i, g1(i)+k} of the concatenated
    alphabet and every kernel denominator is a cross-slot difference.
    """
    q = f1.quiver
    g1, g2 = f1.gamma, f2.gamma
    alph = Alphabet(q.vertices, (g1, g2))
    b = kernel_exponent_check(q)
    p1 = f1.poly.rename([alph.index(1, v.vertex, v.index) for v in f1.alphabet.variables], alph)
    p2 = f2.poly.rename([alph.index(2, v.vertex, v.index) for v in f2.alphabet.variables], alph)
    out = LocRat(p1 * p2)
    for i in range(q.n):
        for j in range(q.n):
            e = -b[i][j]
            if e == 0:
                continue
            for a in alph.group(1, i):
                for bb in alph.group(2, j):
                    out = out * LocRat.linear_power(alph, bb, a, e)
    return out


def module_action(z: MPoly, f: CohaElem) -> CohaElem:
    """Multiply ``f`` by a symmetric polynomial ``z`` in the same alphabet."""
    if z.alphabet != f.alphabet:
        raise ValueError("alphabet mismatch between multiplier and element")
    z = SymPoly.of(z)
    return CohaElem(f.quiver, f.gamma, SymPoly.of(z * f.poly, check=False))


def coh_degree(f: CohaElem) -> set[int]:
    """Cohomological degrees chi(g, g) + 2d of the homogeneous parts."""
    base = chi(f.quiver, f.gamma, f.gamma)
    return {int(base + 2 * d) for d in f.poly.degrees()}


def homogeneous_parts(f: CohaElem) -> dict[int, CohaElem]:
    base = chi(f.quiver, f.gamma, f.gamma)
    return {int(base + 2 * d): CohaElem(f.quiver, f.gamma, SymPoly.of(f.poly.homogeneous_part(d), check=False))
            for d in sorted(f.poly.degrees())}

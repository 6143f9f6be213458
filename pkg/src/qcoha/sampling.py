"""Seeded random elements for the property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .coha import CohaElem, alphabet_of
from .polyalg import Alphabet, MPoly, SymPoly, power_sum
from .quiver import DimVector, Quiver


def random_dim(q: Quiver, rng: random.Random, max_comp: int, allow_zero: bool = False) -> DimVector:
    while True:
        g = DimVector(tuple(rng.randint(0, max_comp) for _ in range(q.n)))
        if allow_zero or not g.is_zero():
            return g


def random_sym(alph: Alphabet, rng: random.Random, max_deg: int, slot: int = 1, terms: int = 3) -> MPoly:
    """Random rational combination of products of power sums of total degree <= max_deg."""
    q = len(alph.vertices)
    gens = [(i, k) for i in range(q) if alph.slots[slot - 1][i] for k in range(1, max_deg + 1)]
    out = MPoly(alph)
    for _ in range(terms):
        c = Fraction(rng.randint(-3, 3), rng.choice((1, 1, 2)))
        if not c:
            continue
        mono = MPoly.constant(alph, c)
        budget = rng.randint(0, max_deg)
        while gens and budget > 0:
            i, k = rng.choice(gens)
            if k > budget:
                continue
            mono = mono * power_sum(alph, slot, i, k)
            budget -= k
        out = out + mono
    if out.is_zero():
        out = MPoly.constant(alph, 1)
    return out


def random_elem(q: Quiver, rng: random.Random, max_comp: int, max_deg: int,
                gamma: DimVector | None = None) -> CohaElem:
    g = gamma if gamma is not None else random_dim(q, rng, max_comp, allow_zero=True)
    alph = alphabet_of(q, g)
    return CohaElem(q, g, SymPoly.of(random_sym(alph, rng, max_deg), check=False))

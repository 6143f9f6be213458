import random
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcoha.coha import (
    CohaElem,
    CohaSum,
    alphabet_of,
    coh_degree,
    homogeneous_parts,
    module_action,
    shuffle_mul,
    shuffles,
    torus_mul_unsym,
)
from qcoha.polyalg import LocRat, MPoly, power_sum
from qcoha.quiver import DimVector, Quiver, b_matrix
from qcoha.sampling import random_elem
from qcoha.specio import load_spec

QUIVERS = ["one_loop", "no_arrow", "two_loop", "three_loop", "sym2v"]


def test_shuffle_counts():
    assert len(shuffles(DimVector((1,)), DimVector((1,)))) == 2
    assert shuffles(DimVector((2,)), DimVector((0,))) == [((0, 1),)]
    assert len(shuffles(DimVector((1, 2)), DimVector((2, 1)))) == 9


def test_desk_products(one_loop, no_arrow):
    assert shuffle_mul(CohaElem.one(one_loop, [1]), CohaElem.one(one_loop, [1])) == CohaElem.of(one_loop, [2], 2)
    x = CohaElem.of(no_arrow, [1], MPoly.var(alphabet_of(no_arrow, DimVector((1,))), 1, 0, 1))
    one = CohaElem.one(no_arrow, [1])
    assert shuffle_mul(one, x) == CohaElem.of(no_arrow, [2], 1)
    assert shuffle_mul(x, one) == CohaElem.of(no_arrow, [2], -1)


def test_unit(quivers):
    rng = random.Random(3)
    for q in quivers.values():
        f = random_elem(q, rng, 2, 2)
        e = CohaElem.one(q)
        assert e * f == f == f * e
        assert CohaElem.of(q, q.zero(), 3) * f == f.scale(3)


def test_torus_kernels(one_loop, no_arrow, three_loop):
    g = DimVector((1,))
    a = torus_mul_unsym(CohaElem.one(no_arrow, g), CohaElem.one(no_arrow, g))
    alph = a.alphabet
    y1, y2 = MPoly.var(alph, 1, 0, 1), MPoly.var(alph, 2, 0, 1)
    assert a == LocRat.linear_power(alph, alph.index(2, 0, 1), alph.index(1, 0, 1), -1)
    assert a.evaluate((Fraction(1), Fraction(3))) == Fraction(1, 2)
    b = torus_mul_unsym(CohaElem.one(three_loop, g), CohaElem.one(three_loop, g))
    assert b == LocRat(MPoly(b.alphabet, ((y2 - y1) ** 2).raw))
    xa = alphabet_of(one_loop, g)
    x = CohaElem.of(one_loop, g, MPoly.var(xa, 1, 0, 1))
    c = torus_mul_unsym(x, x)
    assert c == LocRat(MPoly(c.alphabet, (y1 * y2).raw))


def _point_value(f1: CohaElem, f2: CohaElem, point):
    """Shuffle sum evaluated numerically at one point; independent of the algebraic code."""
    q = f1.quiver
    b = b_matrix(q)
    g1, g2 = f1.gamma, f2.gamma
    g = g1 + g2
    coords = {}
    pos = 0
    for i in range(q.n):
        for k in range(g[i]):
            coords[(i, k)] = point[pos]
            pos += 1
    total = Fraction(0)
    per_vertex = [list(combinations(range(g[i]), g1[i])) for i in range(q.n)]
    for choice in product(*per_vertex):
        first = {i: list(choice[i]) for i in range(q.n)}
        second = {i: [k for k in range(g[i]) if k not in choice[i]] for i in range(q.n)}
        v1 = [coords[(i, k)] for i in range(q.n) for k in first[i]]
        v2 = [coords[(i, k)] for i in range(q.n) for k in second[i]]
        term = f1.poly.evaluate(v1) * f2.poly.evaluate(v2)
        for i in range(q.n):
            for j in range(q.n):
                for a in first[i]:
                    for bb in second[j]:
                        term *= (coords[(j, bb)] - coords[(i, a)]) ** (-b[i][j])
        total += term
    return total


@pytest.mark.parametrize("name", QUIVERS)
def test_product_matches_pointwise_orbit_sum(name):
    q = load_spec(name).quiver
    rng = random.Random(11)
    checked = 0
    for _ in range(12):
        f1, f2 = random_elem(q, rng, 2, 2), random_elem(q, rng, 2, 2)
        if (f1.gamma + f2.gamma).total > 5:
            continue
        m = shuffle_mul(f1, f2)
        n = m.alphabet.nvars
        pt = [Fraction(rng.randint(-50, 50), rng.randint(1, 7)) + Fraction(k, 101) for k in range(n)]
        if len(set(pt)) < n:
            continue
        assert m.poly.evaluate(pt) == _point_value(f1, f2, pt)
        checked += 1
    assert checked >= 6


def test_module_action(one_loop):
    g = DimVector((2,))
    alph = alphabet_of(one_loop, g)
    e1, p2 = power_sum(alph, 1, 0, 1), power_sum(alph, 1, 0, 2)
    one = CohaElem.one(one_loop, g)
    assert module_action(e1, one).poly == e1
    assert module_action(MPoly.constant(alph, 1), one) == one
    f = module_action(e1, one)
    assert module_action(p2, f).poly == p2 * e1


def test_coh_degrees(no_arrow, one_loop, three_loop):
    x = CohaElem.of(no_arrow, [1], MPoly.var(alphabet_of(no_arrow, DimVector((1,))), 1, 0, 1))
    assert coh_degree(x) == {3}
    assert coh_degree(CohaElem.one(one_loop, [3])) == {0}
    assert coh_degree(CohaElem.one(three_loop, [1])) == {-2}
    parts = homogeneous_parts(x + CohaElem.one(no_arrow, [1]))
    assert sorted(parts) == [1, 3]


def test_coha_sum_distributes(quivers):
    q = quivers["two_loop"]
    rng = random.Random(5)
    a, b, c = (random_elem(q, rng, 2, 2) for _ in range(3))
    s = CohaSum.of([a, b])
    prod = s * CohaSum.of([c])
    assert prod == CohaSum.of([a * c, b * c])


def test_grading_mismatch_rejected(one_loop):
    with pytest.raises(ValueError):
        CohaElem.one(one_loop, [1]) + CohaElem.one(one_loop, [2])
    with pytest.raises(ValueError):
        shuffle_mul(CohaElem.one(one_loop, [1]), CohaElem.one(Quiver.loops(2), [1]))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(QUIVERS), st.integers(0, 10**6))
def test_associativity_property(name, seed):
    q = load_spec(name).quiver
    rng = random.Random(seed)
    while True:
        a, b, c = (random_elem(q, rng, 2, 2) for _ in range(3))
        if (a.gamma + b.gamma + c.gamma).total <= 4:
            break
    assert (a * b) * c == a * (b * c)

from fractions import Fraction

import pytest

from qcoha.dt import (
    Character,
    NonIntegral,
    NonSymmetricQuiver,
    TruncationTooSmall,
    coha_character,
    extract_dt,
    jordan_potential_identity,
    positivity_report,
    sym_of,
)
from qcoha.polyalg import LaurentSeries
from qcoha.quiver import DimVector, Quiver
from qcoha.specio import load_spec

ORDER = 20


def _expand_product(factors, x_max, t_max):
    """Brute-force expansion of prod over (x-exponent, t-exponent, kind) into {(n, e): c}.

    kind 'odd' contributes (1 + t^e x^n), kind 'even' contributes 1/(1 - t^e x^n).
    """
    series = {(0, 0): 1}
    for n, e, kind in factors:
        new = {}
        for (a, b), c in series.items():
            r = 0
            while a + r * n <= x_max and b + r * e <= t_max:
                key = (a + r * n, b + r * e)
                new[key] = new.get(key, 0) + c
                r += 1
                if kind == "odd" and r > 1:
                    break
        series = new
    return series


def _as_table(ch: Character, x_max, t_max):
    return {(g[0], e): c for g in (DimVector((n,)) for n in range(x_max + 1))
            for e, c in ch[g].coeffs.items() if e <= t_max and c}


def test_character_examples():
    no = coha_character(Quiver.loops(0), [1], 12)
    assert no[DimVector((1,))] == LaurentSeries({1: 1, 3: 1, 5: 1, 7: 1, 9: 1, 11: 1}, 12)
    one = coha_character(Quiver.loops(1), [2], 8)
    assert [one[DimVector((2,))][e] for e in range(0, 8, 2)] == [1, 1, 2, 2]
    three = coha_character(Quiver.loops(3), [1], 6)
    assert [three[DimVector((1,))][e] for e in (-2, 0, 2, 4)] == [1, 1, 1, 1]


def test_sym_of_matches_euler_products():
    x_max = 4
    odd = sym_of({1: {1: 1}}, 4, ORDER)
    oracle = _expand_product([(1, 2 * k + 1, "odd") for k in range(ORDER)], x_max, ORDER)
    assert _as_table(odd, x_max, ORDER - 2) == {k: v for k, v in oracle.items() if k[1] <= ORDER - 2 and v}
    even = sym_of({1: {0: 1}}, 4, ORDER)
    oracle = _expand_product([(1, 2 * k, "even") for k in range(ORDER)], x_max, ORDER)
    assert _as_table(even, x_max, ORDER - 2) == {k: v for k, v in oracle.items() if k[1] <= ORDER - 2 and v}
    assert sym_of({}, 3, ORDER)[DimVector((2,))].is_zero()


def test_sym_of_equals_character_for_no_arrow():
    q = Quiver.loops(0)
    assert sym_of({1: {1: 1}}, 4, ORDER) == coha_character(q, [4], ORDER)


@pytest.mark.parametrize("loops,expected", [(0, {1: 1}), (1, {0: 1})])
def test_extract_trivial_cases(loops, expected):
    om = extract_dt(coha_character(Quiver.loops(loops), [4], ORDER), ORDER)
    assert om[DimVector((1,))].coeffs == {k: Fraction(v) for k, v in expected.items()}
    for n in (2, 3, 4):
        assert om[DimVector((n,))].is_zero()


def test_two_loop_values_and_positivity():
    om = extract_dt(coha_character(Quiver.loops(2), [3], 26), 26)
    assert om[DimVector((1,))].coeffs == {-1: 1}
    assert om[DimVector((2,))].coeffs == {-4: 1}
    assert om[DimVector((3,))].coeffs == {-9: 1}
    assert positivity_report(om).clean


def test_two_vertex_dt():
    q = load_spec("sym2v").quiver
    om = extract_dt(coha_character(q, [1, 1], 16), 16)
    assert om[q.dim([1, 0])].coeffs == {1: 1}
    assert om[q.dim([1, 1])].coeffs == {-2: 1, 0: 1}


def test_roundtrip_sym_of_extract():
    V = {(1,): {-1: 2, 0: 1}, (2,): {-4: 1}}
    H = sym_of(V, 3, 24)
    om = extract_dt(H, 24)
    assert om.as_classes() == {DimVector((1,)): {-1: 2, 0: 1}, DimVector((2,)): {-4: 1}}


def test_planted_negativity_flagged():
    H = Character(DimVector((1,)))
    H[DimVector((0,))] = LaurentSeries({0: 1})
    H[DimVector((1,))] = LaurentSeries({1: -1}, 10)
    rep = positivity_report(extract_dt(H, 10))
    assert not rep.clean
    assert rep.negatives[0][:2] == ("(1)", 1)


def test_truncation_too_small():
    with pytest.raises(TruncationTooSmall):
        extract_dt(coha_character(Quiver.loops(0), [2], 2), 2)


def test_non_integral_rejected():
    H = Character(DimVector((1,)))
    H[DimVector((0,))] = LaurentSeries({0: 1})
    H[DimVector((1,))] = LaurentSeries({0: Fraction(1, 2)}, 10)
    with pytest.raises(NonIntegral):
        extract_dt(H, 10)


def test_non_symmetric_rejected():
    with pytest.raises(NonSymmetricQuiver):
        coha_character(Quiver.build(["1", "2"], [("a", "1", "2")]), [1, 1], 8)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_jordan_identity(d):
    lhs, rhs = jordan_potential_identity(d, 4, 20)
    assert lhs == rhs


def test_q_rendering():
    om = extract_dt(coha_character(Quiver.loops(2), [2], 16), 16)
    assert om.rendered("t")["(1)"] == "t^-1"
    assert om.rendered("q+")["(1)"] == "q^(-1/2)"
    assert om.rendered("q-")["(1)"] == "-q^(-1/2)"
    assert om.rendered("q-")["(2)"] == "q^-2"

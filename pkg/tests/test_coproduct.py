import random

import pytest

from qcoha.coha import CohaElem, alphabet_of
from qcoha.coproduct import (
    DEFAULT,
    LocTensor,
    SampleSpec,
    SwapConvention,
    as_tensor,
    check_bialgebra,
    check_coassoc,
    check_counit,
    check_delta_linearity,
    check_swap_involution,
    compatibility_lhs,
    compatibility_rhs,
    counit,
    delta,
    delta_split,
    eue,
    localize,
    tensor,
    tensor_alphabet,
    twisted_swap,
)
from qcoha.polyalg import LocalisationError, LocRat, MPoly, power_sum
from qcoha.quiver import DimVector
from qcoha.sampling import random_elem
from qcoha.specio import load_spec

G1 = DimVector((1,))


def _slot_var(alph, slot, k=1):
    return MPoly.var(alph, slot, 0, k)


def _value(t: LocTensor, poly: MPoly, den=None) -> LocTensor:
    return LocTensor(t.quiver, t.slots, LocRat(poly, den or {}), t.localized)


def test_delta_one_loop_is_unshuffle(one_loop):
    alph = alphabet_of(one_loop, DimVector((2,)))
    f = CohaElem.of(one_loop, [2], power_sum(alph, 1, 0, 1))
    t = delta_split(f, [1])
    a = t.alphabet
    assert t.value == LocRat(_slot_var(a, 1) + _slot_var(a, 2))


def test_delta_no_arrow_kernel(no_arrow):
    t = delta_split(CohaElem.one(no_arrow, [2]), [1])
    a = t.alphabet
    assert t.value == LocRat(_slot_var(a, 2) - _slot_var(a, 1))


def test_delta_extreme_components(quivers):
    rng = random.Random(2)
    for q in quivers.values():
        f = random_elem(q, rng, 2, 2, q.dim([1] * q.n))
        left = delta_split(f, f.gamma)
        right = delta_split(f, q.zero())
        assert counit(left, 2) == as_tensor(f)
        assert counit(right, 1) == as_tensor(f)
        assert len(delta(f)) == len(f.gamma.splittings())


def test_eue(no_arrow, three_loop):
    alph = tensor_alphabet(no_arrow, (G1, G1))
    assert eue(no_arrow, "Q0", alph, 1, 2) == _slot_var(alph, 2) - _slot_var(alph, 1)
    assert eue(no_arrow, "Q1", alph, 1, 2) == MPoly.constant(alph, 1)
    alph3 = tensor_alphabet(three_loop, (G1, G1))
    assert eue(three_loop, "Q1", alph3, 1, 2) == (_slot_var(alph3, 2) - _slot_var(alph3, 1)) ** 3


def _unit_pair(q):
    t = tensor(as_tensor(CohaElem.one(q, G1)), as_tensor(CohaElem.one(q, G1)))
    return localize(t, [(1, 2)])


def test_twisted_swap_factors(no_arrow, one_loop):
    t = _unit_pair(no_arrow)
    assert twisted_swap(t, 1).value == LocRat(MPoly.constant(t.alphabet, -1))
    u = _unit_pair(one_loop)
    assert twisted_swap(u, 1).value == LocRat(MPoly.constant(u.alphabet, 1))
    z = localize(tensor(as_tensor(CohaElem.one(no_arrow, [2])), as_tensor(CohaElem.one(no_arrow, [0]))), [(1, 2)])
    assert twisted_swap(z, 1).value == LocRat(MPoly.constant(twisted_swap(z, 1).alphabet, 1))


def test_twisted_swap_needs_localisation(no_arrow):
    t = tensor(as_tensor(CohaElem.one(no_arrow, G1)), as_tensor(CohaElem.one(no_arrow, G1)))
    with pytest.raises(LocalisationError):
        twisted_swap(t, 1)


def test_desk_compatibility(one_loop, no_arrow):
    a = CohaElem.one(one_loop, G1)
    rhs = compatibility_rhs(a, a, G1)
    assert rhs.value == LocRat(MPoly.constant(rhs.alphabet, 2))
    assert compatibility_lhs(a, a, G1) == rhs
    b = CohaElem.one(no_arrow, G1)
    assert compatibility_rhs(b, b, G1).value.is_zero()
    l0_rule = SwapConvention("l0")
    assert compatibility_rhs(a, a, G1, l0_rule).value.is_zero()


def test_unit_factor_reduces_to_delta(quivers):
    rng = random.Random(7)
    for q in quivers.values():
        a = random_elem(q, rng, 2, 2, q.dim([1] * q.n))
        one = CohaElem.one(q)
        for first, _ in a.gamma.splittings():
            assert compatibility_rhs(a, one, first) == delta_split(a, first)


SMALL = SampleSpec(max_comp=2, max_deg=2, trials=12, seed=1)


@pytest.mark.parametrize("name", ["one_loop", "no_arrow", "two_loop", "three_loop"])
def test_axiom_checks_pass(name):
    q = load_spec(name).quiver
    for check in (check_bialgebra, check_coassoc, check_counit, check_swap_involution, check_delta_linearity):
        rep = check(q, SMALL, DEFAULT, 1, name)
        assert rep.passed, rep.minimal()
        assert rep.trials == SMALL.trials


def test_sym2v_checks_pass():
    q = load_spec("sym2v").quiver
    spec = SampleSpec(2, 2, 6, seed=4, max_total=5)
    for check in (check_bialgebra, check_coassoc, check_swap_involution):
        assert check(q, spec, DEFAULT, 1, "sym2v").passed


def test_l0_rule_reports_counterexample(one_loop):
    rep = check_bialgebra(one_loop, SampleSpec(trials=3), SwapConvention("l0"), 1, "one_loop")
    assert not rep.passed
    cx = rep.minimal()
    assert cx["lhs"] == "2" and cx["rhs"] == "0"
    assert cx["gamma_a"] == "(1)" and cx["gamma_b"] == "(1)"


def test_reports_are_worker_independent(one_loop):
    spec = SampleSpec(trials=6, seed=9)
    a = check_bialgebra(one_loop, spec, SwapConvention("l0"), 1, "x").to_json()
    b = check_bialgebra(one_loop, spec, SwapConvention("l0"), 2, "x").to_json()
    assert a == b


def test_crosslinearity(one_loop, no_arrow):
    # multiplying by (x^(2) - x^(1)) before or after multiplication by its inverse is the identity
    for q in (one_loop, no_arrow):
        t = _unit_pair(q)
        a = t.alphabet
        lin = LocRat(_slot_var(a, 2) - _slot_var(a, 1))
        inv = LocRat.linear_power(a, a.index(2, 0, 1), a.index(1, 0, 1), -1)
        assert (t.value * lin * inv) == t.value


def test_bad_convention_rejected():
    with pytest.raises(ValueError):
        SwapConvention("weird")
    with pytest.raises(ValueError):
        SwapConvention("none", "other")

"""Localised coproduct, twisted swap, the double product m~2, and axiom checks."""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .coha import (
    CohaElem,
    _loop_free,
    _perm_sign,
    _vandermonde_raw,
    kernel_exponent_check,
    shuffle_mul,
    shuffles,
)
from .polyalg import Alphabet, LocalisationError, LocRat, MPoly, exact_divide
from .polyalg.locrat import difference
from .quiver import DimVector, Quiver, chi, l0

SIGN_RULES = ("none", "l0", "chi")
DELTA_KERNELS = ("naive", "eue_ratio")


@dataclass(frozen=True)
class SwapConvention:
    sign_rule: str = "none"
    delta_kernel: str = "naive"

    def __post_init__(self):
        if self.sign_rule not in SIGN_RULES:
            raise ValueError(f"sign_rule must be one of {SIGN_RULES}")
        if self.delta_kernel not in DELTA_KERNELS:
            raise ValueError(f"delta_kernel must be one of {DELTA_KERNELS}")

    def to_json(self) -> dict:
        return {"sign_rule": self.sign_rule, "delta_kernel": self.delta_kernel}


DEFAULT = SwapConvention()


def _pairs_for(r: int, pairs: Iterable[tuple[int, int]]) -> frozenset:
    out = set()
    for c, d in pairs:
        if not (1 <= c <= r and 1 <= d <= r) or c == d:
            raise ValueError(f"bad slot pair {(c, d)}")
        out.add((c, d))
        out.add((d, c))
    return frozenset(out)


@dataclass(frozen=True)
class LocTensor:
    quiver: Quiver
    slots: tuple[DimVector, ...]
    value: LocRat
    localized: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        alph = self.value.alphabet
        if alph.slots != self.slots or alph.vertices != self.quiver.vertices:
            raise ValueError("value alphabet does not match the slots")
        for u, v in self.value.den:
            c, d = alph.slot_of(u), alph.slot_of(v)
            if (c, d) not in self.localized:
                raise LocalisationError(f"denominator uses slots {(c, d)}, which are not localised")

    @property
    def alphabet(self) -> Alphabet:
        return self.value.alphabet

    def __eq__(self, other) -> bool:
        return (isinstance(other, LocTensor) and self.slots == other.slots
                and self.value == other.value)

    __hash__ = None

    def __add__(self, other: LocTensor) -> LocTensor:
        if self.slots != other.slots:
            raise ValueError("cannot add tensors with different slots")
        return LocTensor(self.quiver, self.slots, self.value + other.value, self.localized | other.localized)

    def canonical(self) -> LocTensor:
        return LocTensor(self.quiver, self.slots, self.value.canonical(), self.localized)

    def __str__(self) -> str:
        return str(self.value.canonical())

    def to_json(self) -> dict:
        v = self.value.canonical()
        from .polyalg.poly import format_poly
        return {"slots": [str(g) for g in self.slots], "numerator": format_poly(v.num),
                "denominator": v.den_text() or "1"}


def tensor_alphabet(q: Quiver, slots: Sequence[DimVector]) -> Alphabet:
    return Alphabet(q.vertices, tuple(slots))


def zero_tensor(q: Quiver, slots: Sequence[DimVector], localized=frozenset()) -> LocTensor:
    alph = tensor_alphabet(q, slots)
    return LocTensor(q, tuple(slots), LocRat(MPoly(alph)), frozenset(localized))


def _linear_product(alph: Alphabet, factors: Iterable[tuple[int, int, int]]) -> LocRat:
    """prod (x_a - x_b)^e over the given (a, b, e)."""
    gens = alph.ctx.gens()
    raw = alph.ctx.constant(1)
    den: dict = {}
    sign = 1
    for a, b, e in factors:
        if e > 0:
            raw = raw * (gens[a] - gens[b]) ** e
        elif e < 0:
            s, key = difference(alph, a, b)
            den[key] = den.get(key, 0) - e
            if s < 0 and e % 2:
                sign = -sign
    return LocRat(MPoly(alph, raw if sign > 0 else -raw), den)


def cross_kernel(q: Quiver, alph: Alphabet, c: int, d: int, sign: int = 1) -> LocRat:
    """prod_{i,j} prod (x^(d)_{j,beta} - x^(c)_{i,alpha})^(sign * b_ij)."""
    b = kernel_exponent_check(q)
    return _linear_product(alph, (
        (bb, a, sign * b[i][j])
        for i in range(q.n) for j in range(q.n) if b[i][j]
        for a in alph.group(c, i) for bb in alph.group(d, j)))


def eue(q: Quiver, kind: str, alph: Alphabet, c: int, d: int) -> MPoly:
    """Equivariant Euler class for slot c against slot d (``kind`` is "Q0" or "Q1")."""
    if c == d:
        raise ValueError("eue needs two distinct slots")
    gens = alph.ctx.gens()
    raw = alph.ctx.constant(1)
    if kind == "Q0":
        pairs = [(i, i) for i in range(q.n)]
    elif kind == "Q1":
        idx = q.vertex_index
        pairs = [(idx(a.source), idx(a.target)) for a in q.arrows]
    else:
        raise ValueError("kind must be Q0 or Q1")
    for s, t in pairs:
        for m in alph.group(c, s):
            for m2 in alph.group(d, t):
                raw = raw * (gens[m2] - gens[m])
    return MPoly(alph, raw)


def _delta_kernel(q: Quiver, alph: Alphabet, c: int, d: int, convention: SwapConvention) -> LocRat:
    if convention.delta_kernel == "naive":
        return cross_kernel(q, alph, c, d)
    num = eue(q, "Q0", alph, d, c)
    idx = q.vertex_index
    inv = _linear_product(alph, (
        (m2, m, -1) for a in q.arrows
        for m in alph.group(c, idx(a.source)) for m2 in alph.group(d, idx(a.target))))
    return inv * num


# -- slot surgery -----------------------------------------------------------------

def _split_map(src: Alphabet, dst: Alphabet, c: int, first: DimVector) -> list[int]:
    """Generator map when slot c of ``src`` becomes slots c, c+1 of ``dst``."""
    out = []
    for v in src.variables:
        if v.slot < c:
            out.append(dst.index(v.slot, v.vertex, v.index))
        elif v.slot > c:
            out.append(dst.index(v.slot + 1, v.vertex, v.index))
        elif v.index <= first[v.vertex]:
            out.append(dst.index(c, v.vertex, v.index))
        else:
            out.append(dst.index(c + 1, v.vertex, v.index - first[v.vertex]))
    return out


def _split_pairs(localized: frozenset, c: int) -> set:
    def lift(s):
        return [s] if s < c else ([c, c + 1] if s == c else [s + 1])
    out = {(c, c + 1), (c + 1, c)}
    for a, b in localized:
        out.update((x, y) for x in lift(a) for y in lift(b))
    return out


def split_slot(t: LocTensor, c: int, first: DimVector, convention: SwapConvention = DEFAULT) -> LocTensor:
    """Apply Delta_{first, rest} to slot c (1-based)."""
    g = t.slots[c - 1]
    if not first <= g:
        raise ValueError(f"{first} does not fit into slot {c} of dimension {g}")
    slots = t.slots[:c - 1] + (first, g - first) + t.slots[c:]
    dst = tensor_alphabet(t.quiver, slots)
    moved = t.value.rename(_split_map(t.alphabet, dst, c, first), dst)
    value = moved * _delta_kernel(t.quiver, dst, c, c + 1, convention)
    return LocTensor(t.quiver, slots, value, frozenset(_split_pairs(t.localized, c)))


def as_tensor(f: CohaElem) -> LocTensor:
    alph = tensor_alphabet(f.quiver, (f.gamma,))
    return LocTensor(f.quiver, (f.gamma,), LocRat(MPoly(alph, f.poly.raw)), frozenset())


def delta_split(f: CohaElem, first, convention: SwapConvention = DEFAULT) -> LocTensor:
    """Delta_{first, gamma - first}(f)."""
    first = f.quiver.dim(first)
    return split_slot(as_tensor(f), 1, first, convention)


def delta(f: CohaElem, convention: SwapConvention = DEFAULT) -> list[LocTensor]:
    return [delta_split(f, g1, convention) for g1, _ in f.gamma.splittings()]


def counit(t: LocTensor, c: int) -> LocTensor:
    """Project slot c (which must be the zero dimension vector) away."""
    if not t.slots[c - 1].is_zero():
        raise ValueError("counit kills every positive-dimension slot")
    slots = t.slots[:c - 1] + t.slots[c:]
    dst = tensor_alphabet(t.quiver, slots)
    mapping = [dst.index(v.slot - (v.slot > c), v.vertex, v.index) for v in t.alphabet.variables]
    pairs = {(a - (a > c), b - (b > c)) for a, b in t.localized if c not in (a, b)}
    return LocTensor(t.quiver, slots, t.value.rename(mapping, dst), frozenset(pairs))


def tensor(t1: LocTensor, t2: LocTensor) -> LocTensor:
    r = len(t1.slots)
    slots = t1.slots + t2.slots
    dst = tensor_alphabet(t1.quiver, slots)
    m1 = [dst.index(v.slot, v.vertex, v.index) for v in t1.alphabet.variables]
    m2 = [dst.index(v.slot + r, v.vertex, v.index) for v in t2.alphabet.variables]
    value = t1.value.rename(m1, dst) * t2.value.rename(m2, dst)
    pairs = set(t1.localized) | {(a + r, b + r) for a, b in t2.localized}
    return LocTensor(t1.quiver, slots, value, frozenset(pairs))


def localize(t: LocTensor, pairs: Iterable[tuple[int, int]]) -> LocTensor:
    return LocTensor(t.quiver, t.slots, t.value, t.localized | _pairs_for(len(t.slots), pairs))


def swap_factor(q: Quiver, alph: Alphabet, tau: int, mu: int) -> LocRat:
    """Factor of the twisted swap written in post-swap slot labels."""
    b = kernel_exponent_check(q)
    factors = []
    for i in range(q.n):
        for j in range(q.n):
            e = b[i][j]
            if not e:
                continue
            # (x^(tau)_{j} - x^(mu)_{i})^(-b_ij)
            factors += [(y, x, -e) for x in alph.group(mu, i) for y in alph.group(tau, j)]
            # (x^(mu)_{j} - x^(tau)_{i})^(b_ij)
            factors += [(y, x, e) for x in alph.group(tau, i) for y in alph.group(mu, j)]
    return _linear_product(alph, factors)


def twisted_swap(t: LocTensor, tau: int, convention: SwapConvention = DEFAULT) -> LocTensor:
    """Swap slots tau and tau + 1 and multiply by the convention-resolved factor."""
    mu = tau + 1
    if (tau, mu) not in t.localized:
        raise LocalisationError(f"slots {(tau, mu)} are not localised; the swap factor is undefined")
    q = t.quiver
    g_tau, g_mu = t.slots[tau - 1], t.slots[mu - 1]
    slots = list(t.slots)
    slots[tau - 1], slots[mu - 1] = g_mu, g_tau
    slots = tuple(slots)
    dst = tensor_alphabet(q, slots)
    swap = {tau: mu, mu: tau}
    mapping = [dst.index(swap.get(v.slot, v.slot), v.vertex, v.index) for v in t.alphabet.variables]
    value = t.value.rename(mapping, dst) * swap_factor(q, dst, tau, mu)
    if convention.sign_rule == "l0" and l0(q, g_tau, g_mu) % 2:
        value = -value
    elif convention.sign_rule == "chi" and chi(q, g_tau, g_mu) % 2:
        value = -value
    pairs = frozenset((swap.get(a, a), swap.get(b, b)) for a, b in t.localized)
    return LocTensor(q, slots, value, pairs)


# -- m~2 ----------------------------------------------------------------------------

def pair_multiply(t: LocTensor) -> LocTensor:
    """Shuffle-multiply slots (1,2) into output slot 1 and (3,4) into output slot 2.

    Same signed-Vandermonde scheme as :func:`shuffle_mul`; the existing
    denominators are all cross-output-slot, so they are only permuted.
    """
    q = t.quiver
    if len(t.slots) != 4:
        raise ValueError("pair_multiply expects four slots")
    P, Qd, R, S = t.slots
    out_slots = (P + Qd, R + S)
    dst = tensor_alphabet(q, out_slots)
    blocks = {1: (1, 0), 2: (1, P), 3: (2, 0), 4: (2, R)}
    mapping = []
    for v in t.alphabet.variables:
        oslot, shift = blocks[v.slot]
        off = shift[v.vertex] if shift else 0
        mapping.append(dst.index(oslot, v.vertex, off + v.index))
    g = t.value.rename(mapping, dst)
    for u, v in g.den:
        if dst.slot_of(u) == dst.slot_of(v):
            raise LocalisationError("denominator joins two factors of the same product")
    b = kernel_exponent_check(q)
    loop_free = _loop_free(q)
    gens = dst.ctx.gens()
    num = g.num.raw
    for oslot, g1, g2 in ((1, P, Qd), (2, R, S)):
        first = {i: [dst.index(oslot, i, k) for k in range(1, g1[i] + 1)] for i in range(q.n)}
        second = {i: [dst.index(oslot, i, g1[i] + k) for k in range(1, g2[i] + 1)] for i in range(q.n)}
        for i in range(q.n):
            for j in range(q.n):
                e = -b[i][j]
                if e > 0:
                    for a in first[i]:
                        for bb in second[j]:
                            num = num * (gens[bb] - gens[a]) ** e
        for i in loop_free:
            num = num * _vandermonde_raw(dst, first[i]) * _vandermonde_raw(dst, second[i])
    base = LocRat(MPoly(dst, num), g.den)
    terms = []
    n = dst.nvars
    for sigma in shuffles(P, Qd):
        for rho in shuffles(R, S):
            perm = list(range(n))
            sign = 1
            for oslot, pi in ((1, sigma), (2, rho)):
                for i, images in enumerate(pi):
                    grp = dst.group(oslot, i)
                    for p, img in enumerate(images):
                        perm[grp[p]] = grp[img]
                    if i in loop_free:
                        sign *= _perm_sign(images)
            term = base.permute(perm)
            terms.append(term if sign > 0 else -term)
    den: dict = {}
    for tm in terms:
        for k, m in tm.den.items():
            den[k] = max(den.get(k, 0), m)
    total = MPoly(dst)
    for tm in terms:
        total = total + tm._lift(den)
    vand = dst.ctx.constant(1)
    for oslot in (1, 2):
        for i in loop_free:
            vand = vand * _vandermonde_raw(dst, dst.group(oslot, i))
    value = LocRat(exact_divide(total, MPoly(dst, vand)), den).canonical()
    return LocTensor(q, out_slots, value, _pairs_for(2, [(1, 2)]))


def m2_tilde(u: LocTensor, convention: SwapConvention = DEFAULT) -> LocTensor:
    """Swap the middle slots, then multiply (1,2) and (3,4)."""
    if len(u.slots) != 4:
        raise ValueError("m2_tilde expects a four-slot tensor")
    needed = _pairs_for(4, [(1, 2), (3, 4)])
    if not needed <= u.localized:
        raise LocalisationError("input must be localised at (1,2) and (3,4)")
    swapped = twisted_swap(localize(u, [(2, 3)]), 2, convention)
    return pair_multiply(swapped)


def compatibility_rhs(a: CohaElem, b: CohaElem, first: DimVector,
                      convention: SwapConvention = DEFAULT) -> LocTensor:
    """Component (first, rest) of m~2(Delta a (x) Delta b)."""
    q = a.quiver
    g = a.gamma + b.gamma
    out_slots = (first, g - first)
    total = zero_tensor(q, out_slots, _pairs_for(2, [(1, 2)]))
    for g1, _ in a.gamma.splittings():
        if not g1 <= first or not first - g1 <= b.gamma:
            continue
        g3 = first - g1
        u = tensor(delta_split(a, g1, convention), delta_split(b, g3, convention))
        total = total + m2_tilde(u, convention)
    return total


def compatibility_lhs(a: CohaElem, b: CohaElem, first: DimVector,
                      convention: SwapConvention = DEFAULT) -> LocTensor:
    return delta_split(shuffle_mul(a, b), first, convention)


# -- verifiers ------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleSpec:
    max_comp: int = 2
    max_deg: int = 2
    trials: int = 100
    seed: int = 0
    max_total: int | None = None

    def to_json(self) -> dict:
        return {"max_comp": self.max_comp, "max_deg": self.max_deg, "trials": self.trials,
                "seed": self.seed, "max_total": self.max_total}


@dataclass
class CheckReport:
    check: str
    quiver: str
    convention: SwapConvention
    spec: SampleSpec
    trials: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def minimal(self) -> dict | None:
        return min(self.failures, key=lambda f: (f["size"], f["trial"])) if self.failures else None

    def to_json(self) -> dict:
        return {"check": self.check, "quiver": self.quiver, "passed": self.passed,
                "trials": self.trials, "failures": len(self.failures),
                "counterexample": self.minimal(), "convention": self.convention.to_json(),
                "sample": self.spec.to_json()}


def _trial_rng(seed: int, index: int) -> random.Random:
    return random.Random(seed * 1_000_003 + index)


def _fits(spec: SampleSpec, *gs: DimVector) -> bool:
    if spec.max_total is None:
        return True
    return sum(g.total for g in gs) <= spec.max_total


def _sample(q: Quiver, spec: SampleSpec, rng: random.Random, count: int, max_deg: int | None = None):
    from .sampling import random_elem
    deg = spec.max_deg if max_deg is None else max_deg
    while True:
        es = [random_elem(q, rng, spec.max_comp, deg) for _ in range(count)]
        if _fits(spec, *(e.gamma for e in es)):
            return es


def _anchor_pairs(q: Quiver) -> list[tuple[CohaElem, CohaElem]]:
    """Deterministic first trials: unit elements at each single vertex."""
    out = []
    for i in range(q.n):
        g = DimVector(tuple(int(k == i) for k in range(q.n)))
        out.append((CohaElem.one(q, g), CohaElem.one(q, g)))
    return out


def _failure(trial: int, size: int, **info) -> dict:
    return {"trial": trial, "size": size, **{k: str(v) for k, v in info.items()}}


def _bialgebra_trial(q: Quiver, spec: SampleSpec, conv: SwapConvention, index: int) -> list[dict]:
    anchors = _anchor_pairs(q)
    if index < len(anchors):
        a, b = anchors[index]
    else:
        a, b = _sample(q, spec, _trial_rng(spec.seed, index), 2)
    fails = []
    for first, _ in (a.gamma + b.gamma).splittings():
        lhs = compatibility_lhs(a, b, first, conv)
        rhs = compatibility_rhs(a, b, first, conv)
        if lhs != rhs:
            fails.append(_failure(index, (a.gamma + b.gamma).total, a=a, b=b, gamma_a=a.gamma,
                                  gamma_b=b.gamma, split=f"{first}|{a.gamma + b.gamma - first}",
                                  lhs=lhs, rhs=rhs))
            break
    return fails


def _coassoc_trial(q: Quiver, spec: SampleSpec, conv: SwapConvention, index: int) -> list[dict]:
    (f,) = _sample(q, spec, _trial_rng(spec.seed, index), 1)
    for g1, rest in f.gamma.splittings():
        for g2, g3 in rest.splittings():
            left = split_slot(delta_split(f, g1 + g2, conv), 1, g1, conv)
            right = split_slot(delta_split(f, g1, conv), 2, g2, conv)
            if left != right:
                return [_failure(index, f.gamma.total, f=f, gamma=f.gamma, split=f"{g1}|{g2}|{g3}",
                                 lhs=left, rhs=right)]
    return []


def _counit_trial(q: Quiver, spec: SampleSpec, conv: SwapConvention, index: int) -> list[dict]:
    (f,) = _sample(q, spec, _trial_rng(spec.seed, index), 1)
    base = as_tensor(f)
    left = counit(delta_split(f, q.zero(), conv), 1)
    right = counit(delta_split(f, f.gamma, conv), 2)
    if left != base or right != base:
        return [_failure(index, f.gamma.total, f=f, left=left, right=right)]
    return []


def _involution_trial(q: Quiver, spec: SampleSpec, conv: SwapConvention, index: int) -> list[dict]:
    rng = _trial_rng(spec.seed, index)
    (f,) = _sample(q, spec, rng, 1)
    splits = f.gamma.splittings()
    first, _ = splits[rng.randrange(len(splits))]
    t = delta_split(f, first, conv)
    for rule in SIGN_RULES:
        c = SwapConvention(rule, conv.delta_kernel)
        back = twisted_swap(twisted_swap(t, 1, c), 1, c)
        if back != t:
            return [_failure(index, f.gamma.total, f=f, split=str(first), sign_rule=rule, result=back)]
    return []


def _linearity_trial(q: Quiver, spec: SampleSpec, conv: SwapConvention, index: int) -> list[dict]:
    from .coha import module_action
    from .sampling import random_sym
    rng = _trial_rng(spec.seed, index)
    (f,) = _sample(q, spec, rng, 1)
    z = random_sym(f.alphabet, rng, spec.max_deg)
    zf = module_action(z, f)
    zt = as_tensor(CohaElem.of(q, f.gamma, z))
    for first, _ in f.gamma.splittings():
        lhs = delta_split(zf, first, conv)
        rhs_value = _restrict(zt, first) * delta_split(f, first, conv).value
        if lhs.value != rhs_value:
            return [_failure(index, f.gamma.total, f=f, z=z, split=str(first))]
    return []


def _restrict(t: LocTensor, first: DimVector) -> LocRat:
    """i_{first, rest}: re-read a one-slot symmetric value in two slots, without kernel."""
    slots = (first, t.slots[0] - first)
    dst = tensor_alphabet(t.quiver, slots)
    return t.value.rename(_split_map(t.alphabet, dst, 1, first), dst)


_TRIALS = {
    "bialgebra": _bialgebra_trial,
    "coassoc": _coassoc_trial,
    "counit": _counit_trial,
    "involution": _involution_trial,
    "linearity": _linearity_trial,
}


def _run_one(args):
    name, q, spec, conv, index = args
    return index, _TRIALS[name](q, spec, conv, index)


def run_check(name: str, q: Quiver, spec: SampleSpec, convention: SwapConvention = DEFAULT,
              workers: int = 1, label: str = "") -> CheckReport:
    report = CheckReport(name, label or _describe(q), convention, spec)
    jobs = [(name, q, spec, convention, k) for k in range(spec.trials)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_one(j) for j in jobs]
    for _, fails in sorted(results, key=lambda r: r[0]):
        report.failures.extend(fails)
    report.trials = len(jobs)
    return report


def check_bialgebra(q, spec, convention=DEFAULT, workers=1, label=""):
    return run_check("bialgebra", q, spec, convention, workers, label)


def check_coassoc(q, spec, convention=DEFAULT, workers=1, label=""):
    return run_check("coassoc", q, spec, convention, workers, label)


def check_counit(q, spec, convention=DEFAULT, workers=1, label=""):
    return run_check("counit", q, spec, convention, workers, label)


def check_swap_involution(q, spec, convention=DEFAULT, workers=1, label=""):
    return run_check("involution", q, spec, convention, workers, label)


def check_delta_linearity(q, spec, convention=DEFAULT, workers=1, label=""):
    return run_check("linearity", q, spec, convention, workers, label)


def _describe(q: Quiver) -> str:
    arrows = ",".join(f"{a.name}:{a.source}->{a.target}" for a in q.arrows)
    return f"vertices={','.join(q.vertices)} arrows=[{arrows}]"

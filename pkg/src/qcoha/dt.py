"""Characters of the algebra and DT invariants from the Sym(V (x) Q[u]) relation.

Series are graded by dimension vectors inside a componentwise box and
truncated in t at a fixed order K: a coefficient at t^e is reported for every
e <= K.  Working products are pruned with a lower bound on the t-valuation of
everything that may still multiply into them, so nothing below the reported
order is ever lost.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .polyalg import GradedSeries, LaurentSeries, box
from .polyalg.series import INF, format_laurent
from .quiver import DimVector, Quiver, chi, is_symmetric


class NonSymmetricQuiver(ValueError):
    pass


class TruncationTooSmall(ArithmeticError):
    pass


class NonIntegral(ArithmeticError):
    pass


class Character(GradedSeries):
    """Graded series whose entries are t-series with integer coefficients."""

    def check_integral(self) -> None:
        for g, s in self.entries.items():
            if not s.is_integral():
                raise NonIntegral(f"non-integer coefficient at {g}")


@dataclass
class DtInvariants:
    bound: DimVector
    order: int
    omega: dict[DimVector, LaurentSeries] = field(default_factory=dict)

    def __getitem__(self, g: DimVector) -> LaurentSeries:
        return self.omega.get(g, LaurentSeries({}, INF))

    def support(self) -> list[DimVector]:
        return [g for g in box(self.bound) if not self[g].is_zero()]

    def as_classes(self) -> dict[DimVector, dict[int, Fraction]]:
        return {g: dict(s.coeffs) for g, s in self.omega.items() if not s.is_zero()}

    def rendered(self, variable: str = "t") -> dict[str, str]:
        """Omega_g as text; ``variable`` is t, q+ (t = q^(1/2)) or q- (t = -q^(1/2))."""
        out = {}
        for g in box(self.bound):
            if g.is_zero():
                continue
            out[str(g)] = render_series(self[g].coeffs, variable)
        return out


def render_series(coeffs: Mapping[int, Fraction], variable: str = "t") -> str:
    if variable == "t":
        return format_laurent(coeffs)
    if variable not in ("q+", "q-"):
        raise ValueError("variable must be t, q+ or q-")
    flip = variable == "q-"
    items = [(e, -c if flip and e % 2 else c) for e, c in sorted(coeffs.items()) if c]
    if not items:
        return "0"
    parts = []
    for n, (e, c) in enumerate(items):
        if e == 0:
            mono = ""
        elif e % 2:
            mono = f"q^({e}/2)"
        else:
            mono = "q" if e == 2 else f"q^{e // 2}"
        mag = abs(c)
        body = (str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}"))
        sign = "-" if c < 0 else "+"
        parts.append((("-" if c < 0 else "") + body) if n == 0 else f" {sign} {body}")
    return "".join(parts)


def default_t_order(gamma_max: DimVector) -> int:
    m = max(gamma_max.counts) if len(gamma_max) else 0
    return 2 * m * m + 8


# -- dense working representation ---------------------------------------------------

Dense = dict[tuple[int, ...], dict[int, int]]


def _shift_add(dst: dict[int, int], src: dict[int, int], d: int, limit, sign: int = 1) -> None:
    for e, c in src.items():
        k = e + d
        if k <= limit:
            v = dst.get(k, 0) + sign * c
            if v:
                dst[k] = v
            else:
                dst.pop(k, None)


def _lower_bounds(bound: DimVector, valuations: Mapping[tuple[int, ...], int]) -> dict[tuple[int, ...], float]:
    """LB(delta): least t-exponent reachable at x^delta from classes of the given valuations."""
    dims = [g.counts for g in box(bound)]
    lb: dict[tuple[int, ...], float] = {d: INF for d in dims}
    lb[tuple(0 for _ in bound)] = 0
    for d in dims:
        for g, v in valuations.items():
            if all(a <= b for a, b in zip(g, d)) and any(g):
                rest = tuple(b - a for a, b in zip(g, d))
                if lb[rest] + v < lb[d]:
                    lb[d] = lb[rest] + v
    return lb


def _headroom(bound: DimVector, lb) -> dict[tuple[int, ...], float]:
    """M(g) = min LB(delta) over delta with g + delta inside the box."""
    out = {}
    for g in (x.counts for x in box(bound)):
        best = 0
        for d, v in lb.items():
            if all(a + b <= c for a, b, c in zip(g, d, bound.counts)) and v < best:
                best = v
        out[g] = best
    return out


def _sym_dense(classes: Mapping[tuple[int, ...], Mapping[int, int]], bound: DimVector, order: int) -> Dense:
    dims = [g.counts for g in box(bound)]
    zero = tuple(0 for _ in bound)
    vals = {}
    for g, cs in classes.items():
        nz = [e for e, c in cs.items() if c]
        if nz:
            vals[g] = min(nz)
    lb = _lower_bounds(bound, vals)
    if any(v == -INF for v in lb.values()):
        raise ValueError("unbounded valuation")
    room = _headroom(bound, lb)
    limit = {g: order - room[g] for g in dims}
    P: Dense = {g: {} for g in dims}
    P[zero] = {0: 1}
    increasing = dims
    decreasing = list(reversed(dims))
    for g, cs in sorted(classes.items()):
        if not any(g) or g not in P:
            continue
        for k, mult in sorted(cs.items()):
            if not mult:
                continue
            if mult < 0 or Fraction(mult).denominator != 1:
                raise ValueError(f"class multiplicity {mult} at {g}, t^{k} is not a nonnegative integer")
            d = k
            while d <= limit[g]:
                for _ in range(int(mult)):
                    if d % 2 == 0:
                        # times 1 / (1 - t^d x^g): in place, increasing order
                        for h in increasing:
                            src = tuple(a - b for a, b in zip(h, g))
                            if min(src) >= 0:
                                _shift_add(P[h], P[src], d, limit[h])
                    else:
                        # times (1 + t^d x^g): decreasing order
                        for h in decreasing:
                            src = tuple(a - b for a, b in zip(h, g))
                            if min(src) >= 0:
                                _shift_add(P[h], P[src], d, limit[h])
                d += 2
    return P


def _to_character(P: Dense, bound: DimVector, order: int) -> Character:
    ch = Character(bound)
    for g, cs in P.items():
        ch[DimVector(g)] = LaurentSeries(cs, order)
    return ch


# -- public operations ----------------------------------------------------------------

def coha_character(q: Quiver, gamma_max, t_order: int | None = None) -> Character:
    if not is_symmetric(q):
        raise NonSymmetricQuiver("degree bookkeeping needs a symmetric quiver")
    bound = q.dim(gamma_max)
    order = default_t_order(bound) if t_order is None else t_order
    ch = Character(bound)
    for g in box(bound):
        shift = chi(q, g, g)
        s = LaurentSeries({0: 1}, INF)
        for n in g:
            for j in range(1, n + 1):
                s = s * LaurentSeries.geometric(2 * j, order - shift)
        ch[g] = s.shift(shift)
    return ch


def sym_of(V: Mapping, gamma_max, t_order: int, quiver: Quiver | None = None) -> Character:
    """Character of Sym(V (x) Q[u]); V maps dimension vectors to {exponent: multiplicity}."""
    bound = quiver.dim(gamma_max) if quiver is not None else _as_dim(gamma_max)
    classes = {}
    for g, cs in V.items():
        g = quiver.dim(g) if quiver is not None else _as_dim(g)
        if g.is_zero():
            raise ValueError("the zero dimension vector carries no primitive classes")
        if isinstance(cs, LaurentSeries):
            cs = cs.coeffs
        for e, c in cs.items():
            if c < 0:
                raise ValueError(f"negative multiplicity {c} at {g}, t^{e}")
        classes[g.counts] = dict(cs)
    return _to_character(_sym_dense(classes, bound, t_order), bound, t_order)


def _as_dim(g) -> DimVector:
    if isinstance(g, DimVector):
        return g
    if isinstance(g, int):
        return DimVector((g,))
    return DimVector(tuple(g))


def extract_dt(H: Character, t_order: int | None = None) -> DtInvariants:
    bound = H.bound
    zero = DimVector.zero(len(bound))
    order = t_order
    if order is None:
        orders = [s.order for s in H.entries.values() if s.order != INF]
        order = int(min(orders)) if orders else 2 * max(bound.counts) ** 2 + 8
    if H[zero] != LaurentSeries({0: 1}):
        raise ValueError("the degree-zero entry of a character must be 1")
    H.check_integral()
    omega: dict[DimVector, LaurentSeries] = {}
    classes: dict[tuple[int, ...], dict[int, int]] = {}
    by_total: dict[int, list[DimVector]] = {}
    for g in box(bound):
        if not g.is_zero():
            by_total.setdefault(g.total, []).append(g)
    for n in sorted(by_total):
        P = _sym_dense(classes, bound, order)
        level = {}
        for g in by_total[n]:
            h = H[g]
            have = P[g.counts]
            deficit = {e: h[e] - have.get(e, 0) for e in set(h.coeffs) | set(have) if e <= order}
            om: dict[int, int] = {}
            for e, c in deficit.items():
                om[e] = om.get(e, 0) + c
                if e + 2 <= order:
                    om[e + 2] = om.get(e + 2, 0) - c
            om = {e: c for e, c in om.items() if c}
            for e, c in om.items():
                if Fraction(c).denominator != 1:
                    raise NonIntegral(f"Omega at {g} has coefficient {c} at t^{e}")
            if any(e >= order - 1 for e in om):
                raise TruncationTooSmall(
                    f"Omega at {g} reaches t^{max(om)} near the truncation order {order}; raise the t-order")
            level[g] = om
        for g, om in level.items():
            omega[g] = LaurentSeries(om, order)
            if om:
                classes[g.counts] = {e: int(c) for e, c in om.items()}
    return DtInvariants(bound, order, omega)


@dataclass
class PositivityReport:
    negatives: list[tuple[str, int, int]]

    @property
    def clean(self) -> bool:
        return not self.negatives

    def to_json(self) -> dict:
        return {"clean": self.clean,
                "negatives": [{"gamma": g, "exponent": e, "coefficient": c} for g, e, c in self.negatives]}


def positivity_report(omega: DtInvariants | Mapping) -> PositivityReport:
    items = omega.omega.items() if isinstance(omega, DtInvariants) else omega.items()
    neg = []
    for g, s in sorted(items, key=lambda kv: str(kv[0])):
        coeffs = s.coeffs if isinstance(s, LaurentSeries) else s
        for e, c in sorted(coeffs.items()):
            if c < 0:
                neg.append((str(g), e, int(c)))
    return PositivityReport(neg)


def free_supercommutative_character(generators: Mapping[tuple[int, int], int], x_order: int,
                                    t_order: int) -> Character:
    """Character of the free supercommutative algebra on one-vertex generators.

    ``generators`` maps (dimension, t-degree) to a count.  Counted directly:
    odd generators by subsets, even ones by multisets.
    """
    counts: dict[tuple[int, int], int] = {(0, 0): 1}
    for (dim, deg), n in sorted(generators.items()):
        for _ in range(n):
            new = dict(counts)
            if deg % 2:
                for (x, e), c in counts.items():
                    key = (x + dim, e + deg)
                    if key[0] <= x_order and key[1] <= t_order:
                        new[key] = new.get(key, 0) + c
            else:
                for (x, e), c in counts.items():
                    r = 1
                    while x + r * dim <= x_order and e + r * deg <= t_order and (dim or deg):
                        key = (x + r * dim, e + r * deg)
                        new[key] = new.get(key, 0) + c
                        r += 1
            counts = new
    bound = DimVector((x_order,))
    ch = Character(bound)
    for x in range(x_order + 1):
        ch[DimVector((x,))] = LaurentSeries({e: c for (xx, e), c in counts.items() if xx == x}, t_order)
    return ch


def jordan_potential_identity(d: int, x_order: int = 4, t_order: int = 20) -> tuple[Character, Character]:
    """(free character on u_{r,n}, Sym of d odd classes (x) Q[u]) for W = X^(d+1)."""
    gens = {(1, 2 * n - 1): d for n in range(1, t_order // 2 + 2)}
    lhs = free_supercommutative_character(gens, x_order, t_order)
    rhs = sym_of({DimVector((1,)): {1: d}}, DimVector((x_order,)), t_order)
    return lhs, rhs


__all__ = [
    "Character", "DtInvariants", "NonIntegral", "NonSymmetricQuiver", "PositivityReport",
    "TruncationTooSmall", "coha_character", "default_t_order", "extract_dt",
    "free_supercommutative_character", "jordan_potential_identity", "positivity_report",
    "render_series", "sym_of",
]

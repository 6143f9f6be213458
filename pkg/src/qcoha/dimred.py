"""Cut-reduced representation varieties, finite-field point counts, and the
bridge from counts to characters.

Counting strategy: arrows of the reduced quiver are split into

* free arrows, absent from every relation (they contribute q^(rs) or |GL| as a factor),
* a set L of non-invertible arrows occurring at most once in every relation
  path, so the relations are affine-linear in the entries of L,
* the remaining arrows, enumerated exhaustively in numpy batches.

For each enumerated tuple the affine system in the L entries is solved by
batched Gaussian elimination over F_p and contributes p^(dim kernel) or 0.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dt import Character
from .polyalg import LaurentSeries, UPoly, interpolate
from .quiver import Cut, DimVector, PathPoly, Potential, Quiver, SpConstraint, chi, cut_relations

DEFAULT_BUDGET = 2 ** 30
CHUNK = 1 << 15


class BudgetExceeded(RuntimeError):
    pass


class NonSquareInvertible(ValueError):
    pass


@dataclass(frozen=True)
class ReducedVariety:
    quiver: Quiver
    arrows: tuple[str, ...]
    cut: Cut
    relations: dict[str, PathPoly]
    sp: SpConstraint

    def fiber_exponent(self, g: DimVector) -> int:
        """Dimension of the cut-arrow directions, sum over a in S of g(s(a)) g(t(a))."""
        q = self.quiver
        return sum(g[q.vertex_index(q.arrow(a).source)] * g[q.vertex_index(q.arrow(a).target)]
                   for a in sorted(self.cut.arrows))

    def zero_part_dimension(self, g: DimVector) -> int:
        q = self.quiver
        return sum(g[q.vertex_index(q.arrow(a).source)] * g[q.vertex_index(q.arrow(a).target)]
                   for a in self.arrows)


def build_reduced(q: Quiver, w: Potential | None, s: Cut, sp: SpConstraint | None = None) -> ReducedVariety:
    sp = sp or SpConstraint(frozenset())
    if w is None or not w.terms:
        if s.arrows:
            raise ValueError("a nonempty cut needs a potential")
        relations = {}
    else:
        relations = cut_relations(w, s)
    bad = sp.invertible_arrows & s.arrows
    if bad:
        raise ValueError(f"cut arrows {sorted(bad)} cannot be constrained to be invertible")
    unknown = sp.invertible_arrows - {a.name for a in q.arrows}
    if unknown:
        raise ValueError(f"unknown arrows {sorted(unknown)} in the invertibility constraint")
    arrows = tuple(a.name for a in q.arrows if a.name not in s.arrows)
    return ReducedVariety(q, arrows, s, relations, sp)


def group_order(g: DimVector, q: int) -> int:
    out = 1
    for n in g:
        for k in range(n):
            out *= q ** n - q ** k
    return out


def gl_order(n: int, q: int) -> int:
    return group_order(DimVector((n,)), q)


@dataclass(frozen=True)
class PointCountRecord:
    gamma: DimVector
    q: int
    raw_count: int
    group_order: int
    enumerated: int = 0

    @property
    def stack_count(self) -> Fraction:
        return Fraction(self.raw_count, self.group_order)

    def to_json(self) -> dict:
        s = self.stack_count
        return {"gamma": str(self.gamma), "q": self.q, "raw_count": self.raw_count,
                "group_order": self.group_order,
                "stack_count": str(s.numerator) if s.denominator == 1 else f"{s.numerator}/{s.denominator}",
                "enumerated": self.enumerated}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


# -- F_p linear algebra ---------------------------------------------------------------

def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def eliminate(M: np.ndarray, p: int, inv: np.ndarray, ncols: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-reduce a batch of augmented systems in place over F_p.

    ``M`` has shape (B, R, ncols + 1).  Returns (rank of the coefficient part,
    consistency flag) per batch entry.
    """
    B, R, _ = M.shape
    rank = np.zeros(B, dtype=np.int64)
    rows = np.arange(R)
    for col in range(ncols):
        mask = (M[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        piv = mask[b].argmax(axis=1)
        r0 = rank[b]
        top = M[b, r0].copy()
        M[b, r0] = M[b, piv]
        M[b, piv] = top
        M[b, r0] = (M[b, r0] * inv[M[b, r0, col]][:, None]) % p
        factors = M[b, :, col].copy()
        factors[np.arange(len(b)), r0] = 0
        M[b] = (M[b] - factors[:, :, None] * M[b, r0][:, None, :]) % p
        rank[b] += 1
    bad = ((M[:, :, ncols] != 0) & (rows[None, :] >= rank[:, None])).any(axis=1)
    return rank, ~bad


def _digits(idx: np.ndarray, p: int, r: int, c: int) -> np.ndarray:
    k = r * c
    powers = p ** np.arange(k, dtype=np.int64)
    return ((idx[:, None] // powers[None, :]) % p).reshape(len(idx), r, c)


def gl_matrices(n: int, p: int) -> np.ndarray:
    """All invertible n x n matrices over F_p, found by exhaustive rank filtering."""
    if n == 0:
        return np.zeros((1, 0, 0), dtype=np.int64)
    total = p ** (n * n)
    inv = inverse_table(p)
    keep = []
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        mats = _digits(idx, p, n, n)
        aug = np.concatenate([mats, np.zeros((len(idx), n, 1), dtype=np.int64)], axis=2)
        rank, _ = eliminate(aug, p, inv, n)
        keep.append(mats[rank == n])
    return np.concatenate(keep, axis=0)


# -- counting plan --------------------------------------------------------------------

@dataclass
class _Plan:
    p: int
    dims: dict[str, tuple[int, int]]               # arrow -> (rows = g(t), cols = g(s))
    enumerated: list[tuple[str, int, np.ndarray | None]]  # (arrow, list size, GL list or None)
    linear: list[tuple[str, int]]                  # (arrow, column offset)
    ncols: int
    relations: list[tuple[int, int, list[tuple[int, tuple[str, ...]]]]]  # (rows, cols, [(coeff, path)])
    vertex_dim: dict[str, int]
    factor: int = 1
    total: int = 1
    sizes: list[tuple[str, int]] = field(default_factory=list)


def _mod_coeff(c: Fraction, p: int) -> int:
    c = Fraction(c)
    if c.denominator % p == 0:
        raise ValueError(f"coefficient {c} is not defined modulo {p}")
    return (c.numerator * pow(c.denominator, -1, p)) % p


def _choose_linear(candidates: Sequence[str], paths: Sequence[tuple[str, ...]], weight) -> list[str]:
    chosen: list[str] = []
    for a in sorted(candidates, key=lambda x: (-weight(x), x)):
        trial = set(chosen) | {a}
        if all(sum(1 for x in path if x in trial) <= 1 for path in paths):
            chosen.append(a)
    return chosen


def plan_count(V: ReducedVariety, g: DimVector, p: int) -> _Plan:
    q = V.quiver
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p >= 2 ** 15:
        raise ValueError("primes must stay below 2^15")
    if len(g) != q.n:
        raise ValueError("dimension vector does not match the quiver")
    vdim = {v: g[i] for i, v in enumerate(q.vertices)}
    dims = {}
    for a in q.arrows:
        dims[a.name] = (vdim[a.target], vdim[a.source])
    for a in sorted(V.sp.invertible_arrows):
        r, c = dims[a]
        if r != c:
            raise NonSquareInvertible(f"arrow {a} must be invertible but maps dimension {c} to {r}")
    relations = []
    paths = []
    in_relations = set()
    for a in sorted(V.relations):
        arr = q.arrow(a)
        rows, cols = vdim[arr.source], vdim[arr.target]
        if rows == 0 or cols == 0:
            continue
        terms = []
        for path, coeff in V.relations[a].items():
            cm = _mod_coeff(coeff, p)
            if cm:
                terms.append((cm, tuple(path)))
                paths.append(tuple(path))
                in_relations.update(path)
        relations.append((rows, cols, terms))
    invertible = V.sp.invertible_arrows
    weight = lambda x: dims[x][0] * dims[x][1]  # noqa: E731
    cands = [a for a in V.arrows if a in in_relations and a not in invertible and weight(a) > 0]
    linear_names = _choose_linear(cands, paths, weight)
    factor = 1
    enumerated = []
    sizes = []
    for a in V.arrows:
        r, c = dims[a]
        if a in linear_names:
            continue
        if a not in in_relations:
            factor *= gl_order(r, p) if a in invertible else p ** (r * c)
            continue
        if a in invertible:
            gl = gl_matrices(r, p)
            enumerated.append((a, len(gl), gl))
            sizes.append((a, len(gl)))
        else:
            enumerated.append((a, p ** (r * c), None))
            sizes.append((a, p ** (r * c)))
    linear, off = [], 0
    for a in linear_names:
        linear.append((a, off))
        off += dims[a][0] * dims[a][1]
    total = 1
    for _, n in sizes:
        total *= n
    return _Plan(p, dims, enumerated, linear, off, relations, vdim, factor, total, sizes)


def _matrices_for(plan: _Plan, idx: np.ndarray) -> dict[str, np.ndarray]:
    mats = {}
    stride = 1
    for name, size, gl in plan.enumerated:
        local = (idx // stride) % size
        stride *= size
        r, c = plan.dims[name]
        mats[name] = gl[local] if gl is not None else _digits(local, plan.p, r, c)
    return mats


def _chain(plan: _Plan, mats: dict[str, np.ndarray], path: Sequence[str], B: int, start_dim: int) -> np.ndarray:
    """Matrix of a path (arrows applied left to right), batched; identity for the empty path."""
    out = np.broadcast_to(np.eye(start_dim, dtype=np.int64), (B, start_dim, start_dim))
    for a in path:
        out = np.matmul(mats[a], out) % plan.p
    return out


def _count_range(plan: _Plan, start: int, stop: int) -> int:
    p = plan.p
    lin = dict(plan.linear)
    inv = inverse_table(p)
    total = 0
    for lo in range(start, stop, CHUNK):
        idx = np.arange(lo, min(stop, lo + CHUNK), dtype=np.int64)
        B = len(idx)
        mats = _matrices_for(plan, idx)
        blocks = []
        for rows, cols, terms in plan.relations:
            A = np.zeros((B, rows * cols, plan.ncols + 1), dtype=np.int64)
            for coeff, path in terms:
                hits = [k for k, x in enumerate(path) if x in lin]
                if not hits:
                    m = _chain(plan, mats, path, B, cols)
                    A[:, :, plan.ncols] = (A[:, :, plan.ncols] - coeff * m.reshape(B, -1)) % p
                    continue
                k = hits[0]
                x = path[k]
                xr, xc = plan.dims[x]
                before = _chain(plan, mats, path[:k], B, cols)           # (B, xc, cols)
                after = _chain(plan, mats, path[k + 1:], B, xr)          # (B, rows, xr)
                block = np.einsum("bru,bvc->brcuv", after, before).reshape(B, rows * cols, xr * xc)
                o = lin[x]
                A[:, :, o:o + xr * xc] = (A[:, :, o:o + xr * xc] + coeff * block) % p
            blocks.append(A)
        if blocks:
            M = np.concatenate(blocks, axis=1)
        else:
            M = np.zeros((B, 0, plan.ncols + 1), dtype=np.int64)
        rank, ok = eliminate(M, p, inv, plan.ncols)
        for r, n in zip(*np.unique(rank[ok], return_counts=True)):
            total += int(n) * p ** (plan.ncols - int(r))
    return total


def count_points(V: ReducedVariety, g: DimVector, p: int, budget: int = DEFAULT_BUDGET,
                 workers: int = 1) -> PointCountRecord:
    plan = plan_count(V, g, p)
    if plan.total > budget:
        arith = " * ".join(f"{n}[{a}]" for a, n in plan.sizes)
        raise BudgetExceeded(f"{arith} = {plan.total} candidate tuples exceeds the budget {budget}")
    if workers > 1 and plan.total > CHUNK:
        step = -(-plan.total // (workers * 4))
        ranges = [(s, min(plan.total, s + step)) for s in range(0, plan.total, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_range, [plan] * len(ranges), *zip(*ranges)))
        count = sum(parts)
    else:
        count = _count_range(plan, 0, plan.total)
    return PointCountRecord(g, p, count * plan.factor, group_order(g, p), plan.total)


@dataclass
class CountSeries:
    gamma: DimVector
    degree_bound: int
    records: list[PointCountRecord]
    polynomial: UPoly
    holdout: PointCountRecord | None = None
    holdout_ok: bool | None = None

    @property
    def integral(self) -> bool:
        return self.polynomial.is_integral()

    def to_json(self) -> dict:
        return {"gamma": str(self.gamma), "degree_bound": self.degree_bound,
                "records": [r.to_json() for r in self.records],
                "polynomial": str(self.polynomial), "integral": self.integral,
                "holdout": self.holdout.to_json() if self.holdout else None,
                "holdout_ok": self.holdout_ok}


def count_series(V: ReducedVariety, g: DimVector, primes: Iterable[int], holdout: int | None = None,
                 budget: int = DEFAULT_BUDGET, workers: int = 1) -> CountSeries:
    primes = list(primes)
    bound = V.zero_part_dimension(g)
    if len(primes) < bound + 1:
        raise ValueError(f"degree bound {bound} needs at least {bound + 1} primes, got {len(primes)}")
    records = [count_points(V, g, p, budget, workers) for p in primes]
    poly = interpolate([(r.q, r.raw_count) for r in records], bound)
    out = CountSeries(g, bound, records, poly)
    if holdout is not None:
        rec = count_points(V, g, holdout, budget, workers)
        out.holdout = rec
        out.holdout_ok = poly(holdout) == rec.raw_count
    return out


# -- bridge to characters -------------------------------------------------------------

def _reverse(coeffs: Sequence[Fraction]) -> list[Fraction]:
    return list(reversed(coeffs))


def _series_inverse(d: Sequence[Fraction], n: int) -> list[Fraction]:
    """Power series inverse of a polynomial with nonzero constant term, to n terms."""
    if not d or d[0] == 0:
        raise ArithmeticError("constant term vanishes; the result is not a Laurent series")
    out = [Fraction(0)] * n
    out[0] = 1 / Fraction(d[0])
    for k in range(1, n):
        acc = Fraction(0)
        for j in range(1, min(k, len(d) - 1) + 1):
            acc += d[j] * out[k - j]
        out[k] = -acc / d[0]
    return out


def bridge_series(numerator: UPoly, denominator: UPoly, shift: int, order: int) -> LaurentSeries:
    """Expand t^shift * N(q)/D(q) at q = t^-2 as a Laurent series in t up to ``order``."""
    if not numerator.coeffs:
        return LaurentSeries({}, order)
    dn, dd = numerator.degree, denominator.degree
    n_rev = _reverse(numerator.coeffs)      # N(t^-2) = t^(-2 dn) * n_rev(t^2)
    d_rev = _reverse(denominator.coeffs)
    lead = shift + 2 * (dd - dn)            # exponent carried outside the power series in t^2
    terms = max(0, (order - lead) // 2 + 1)
    inv = _series_inverse(d_rev, terms)
    coeffs: dict[int, Fraction] = {}
    for i, a in enumerate(n_rev):
        if not a:
            continue
        for j in range(terms - i):
            c = a * inv[j]
            if c:
                e = lead + 2 * (i + j)
                coeffs[e] = coeffs.get(e, 0) + c
    return LaurentSeries(coeffs, order)


def group_poly(g: DimVector) -> UPoly:
    """|G_g(F_q)| as a polynomial in q."""
    poly = [Fraction(1)]
    for n in g:
        for k in range(n):
            # multiply by q^n - q^k
            new = [Fraction(0)] * (len(poly) + n)
            for i, c in enumerate(poly):
                new[i + n] += c
                new[i + k] -= c
            poly = new
    return UPoly.of(poly)


HYPOTHESES = "valid under purity + polynomial-count hypotheses"


@dataclass
class BridgeResult:
    character: Character
    metadata: dict


def bridge_character(V: ReducedVariety, counts: Mapping[DimVector, UPoly], gamma_max: DimVector,
                     order: int, apply_shift: bool = True) -> BridgeResult:
    """Characters from interpolated raw counts.

    Stack count R(q) = raw(q) q^fiber / |G(q)|, read at q = t^-2, times t^(-chi(g,g)).
    """
    q = V.quiver
    ch = Character(gamma_max)
    meta = {"hypotheses": HYPOTHESES, "substitution": "q = t^-2", "entries": {}}
    for g, raw in counts.items():
        if not g <= gamma_max:
            continue
        fiber = V.fiber_exponent(g)
        num = UPoly.of([0] * fiber + list(raw.coeffs))
        shift = -chi(q, g, g) if apply_shift else 0
        ch[g] = bridge_series(num, group_poly(g), shift, order)
        meta["entries"][str(g)] = {"fiber_exponent": fiber, "chi": chi(q, g, g), "shift": shift,
                                   "integral_count": raw.is_integral()}
    return BridgeResult(ch, meta)


__all__ = [
    "BridgeResult", "BudgetExceeded", "CountSeries", "NonSquareInvertible", "PointCountRecord",
    "ReducedVariety", "bridge_character", "bridge_series", "build_reduced", "count_points",
    "count_series", "eliminate", "gl_matrices", "gl_order", "group_order", "group_poly",
    "inverse_table", "is_prime", "plan_count",
]

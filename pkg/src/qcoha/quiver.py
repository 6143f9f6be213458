"""Quivers, dimension vectors, potentials and cuts.

Everything downstream (kernel exponents, degree shifts, variable order) is
driven by the data here, so the vertex declaration order is load-bearing:
it fixes the order of the variables ``x[c][i,k]`` in every alphabet.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product


class QuiverError(ValueError):
    pass


class InvalidCut(QuiverError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class DimVector:
    """A dimension vector, stored in the vertex order of its quiver."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise QuiverError(f"negative dimension in {self.counts}")

    @classmethod
    def zero(cls, n: int) -> DimVector:
        return cls((0,) * n)

    def __add__(self, other: DimVector) -> DimVector:
        return DimVector(tuple(a + b for a, b in zip(self.counts, other.counts, strict=True)))

    def __sub__(self, other: DimVector) -> DimVector:
        return DimVector(tuple(a - b for a, b in zip(self.counts, other.counts, strict=True)))

    def __le__(self, other: DimVector) -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts, strict=True))

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def __iter__(self):
        return iter(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def is_zero(self) -> bool:
        return not any(self.counts)

    def splittings(self) -> list[tuple[DimVector, DimVector]]:
        """All ordered pairs (g1, g2) with g1 + g2 == self."""
        out = []
        for first in product(*(range(c + 1) for c in self.counts)):
            g1 = DimVector(first)
            out.append((g1, self - g1))
        return out

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.counts)) + ")"


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex identifiers")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise QuiverError("duplicate arrow names")
        index = {v: k for k, v in enumerate(self.vertices)}
        for a in self.arrows:
            if a.source not in index or a.target not in index:
                raise QuiverError(f"arrow {a.name} references an unknown vertex")
        object.__setattr__(self, "_index", index)

    @classmethod
    def build(cls, vertices: Iterable, arrows: Iterable[tuple[str, str, str]]) -> Quiver:
        return cls(tuple(str(v) for v in vertices),
                   tuple(Arrow(str(n), str(s), str(t)) for n, s, t in arrows))

    @classmethod
    def loops(cls, n: int, name: str = "x") -> Quiver:
        """One vertex with ``n`` loops (n=0: the point quiver, n=1: Jordan)."""
        names = [f"{name}{k}" for k in range(1, n + 1)] if n > 1 else [name] * n
        return cls.build(["1"], [(a, "1", "1") for a in names])

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex_index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise QuiverError(f"unknown vertex {v!r}") from None

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise QuiverError(f"unknown arrow {name!r}")

    def dim(self, spec: Mapping[str, int] | Sequence[int] | int) -> DimVector:
        """Build a dimension vector from a mapping, a sequence, or an int (one-vertex quivers)."""
        if isinstance(spec, DimVector):
            counts = spec.counts
        elif isinstance(spec, int):
            if self.n != 1:
                raise QuiverError("integer dimension vectors need a one-vertex quiver")
            counts = (spec,)
        elif isinstance(spec, Mapping):
            counts = [0] * self.n
            for v, c in spec.items():
                counts[self.vertex_index(str(v))] = int(c)
            counts = tuple(counts)
        else:
            counts = tuple(int(c) for c in spec)
        if len(counts) != self.n:
            raise QuiverError(f"dimension vector {counts} has wrong length for {self.n} vertices")
        return DimVector(tuple(counts))

    def zero(self) -> DimVector:
        return DimVector.zero(self.n)

    def arrow_counts(self) -> list[list[int]]:
        m = [[0] * self.n for _ in range(self.n)]
        for a in self.arrows:
            m[self._index[a.source]][self._index[a.target]] += 1
        return m


def b_matrix(q: Quiver) -> list[list[int]]:
    """b_ij = delta_ij - #{arrows i -> j}."""
    counts = q.arrow_counts()
    return [[(i == j) - counts[i][j] for j in range(q.n)] for i in range(q.n)]


def l0(q: Quiver, g1: DimVector, g2: DimVector) -> int:
    return sum(a * b for a, b in zip(g1, g2))


def l1(q: Quiver, g1: DimVector, g2: DimVector) -> int:
    return sum(g1[q.vertex_index(a.source)] * g2[q.vertex_index(a.target)] for a in q.arrows)


def chi(q: Quiver, g1: DimVector, g2: DimVector) -> int:
    """Euler form l0 - l1."""
    return l0(q, g1, g2) - l1(q, g1, g2)


def l_gamma(g: DimVector) -> int:
    return sum(c * c - c for c in g)


def is_symmetric(q: Quiver) -> bool:
    m = q.arrow_counts()
    return all(m[i][j] == m[j][i] for i in range(q.n) for j in range(q.n))


def is_degree_preserving(q: Quiver, dims: Iterable[DimVector]) -> bool:
    dims = list(dims)
    return all(chi(q, a, b) == chi(q, b, a) for a in dims for b in dims)


# -- paths and potentials ----------------------------------------------------

Path = tuple[str, ...]


def render_path(path: Path) -> str:
    """Composition-order word: the path a, f, g, l prints as ``lgfa``."""
    if not path:
        return "1"
    names = list(reversed(path))
    sep = "" if all(len(n) == 1 for n in names) else "*"
    return sep.join(names)


def parse_word(word: str, q: Quiver) -> Path:
    """Inverse of :func:`render_path` for single-letter arrow names or ``*``-joined words."""
    names = word.split("*") if "*" in word else list(word)
    for n in names:
        q.arrow(n)
    return tuple(reversed(names))


class PathPoly(dict):
    """Rational linear combination of paths, kept in first-appearance order."""

    def add(self, path: Path, coeff) -> None:
        c = self.get(path, Fraction(0)) + Fraction(coeff)
        if c == 0:
            self.pop(path, None)
        else:
            self[path] = c

    def __str__(self) -> str:
        if not self:
            return "0"
        parts = []
        for k, (path, c) in enumerate(self.items()):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            word = render_path(path)
            if mag == 1:
                body = word
            elif word == "1":
                body = str(mag)
            else:
                body = f"{mag}*{word}"
            if k == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)


def _least_rotation(cycle: Sequence[str]) -> Path:
    cycle = tuple(cycle)
    return min(cycle[k:] + cycle[:k] for k in range(len(cycle)))


@dataclass(frozen=True)
class Potential:
    """Finite combination of cycles modulo cyclic rotation.

    ``terms`` maps the lexicographically least rotation of each cycle (in
    path order) to its coefficient; insertion order follows the input.
    """

    quiver: Quiver
    terms: Mapping[Path, Fraction]

    @classmethod
    def build(cls, q: Quiver, terms: Iterable[tuple[object, Sequence[str]]]) -> Potential:
        merged: dict[Path, Fraction] = {}
        for coeff, cycle in terms:
            cyc = tuple(cycle)
            _check_cycle(q, cyc)
            key = _least_rotation(cyc)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(coeff)
        return cls(q, {k: v for k, v in merged.items() if v != 0})

    @classmethod
    def from_words(cls, q: Quiver, terms: Iterable[tuple[object, str]]) -> Potential:
        """Build from words written in composition order, e.g. ``[(1, "lgfa"), (-1, "jgda")]``."""
        return cls.build(q, [(c, parse_word(w, q)) for c, w in terms])

    def __eq__(self, other) -> bool:
        return (isinstance(other, Potential) and self.quiver == other.quiver
                and dict(self.terms) == dict(other.terms))

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        pp = PathPoly()
        for cyc, c in self.terms.items():
            pp.add(cyc, c)
        return str(pp)


def _check_cycle(q: Quiver, cycle: Path) -> None:
    if not cycle:
        raise QuiverError("empty cycle in potential")
    arrows = [q.arrow(n) for n in cycle]
    for k, a in enumerate(arrows):
        nxt = arrows[(k + 1) % len(arrows)]
        if a.target != nxt.source:
            raise QuiverError(f"cycle {cycle} is not composable at {a.name} -> {nxt.name}")


def cyclic_derivative(w: Potential, a: str) -> PathPoly:
    """Sum over occurrences ``m = u a v`` of ``coeff * (v u)``, in path order."""
    w.quiver.arrow(a)
    out = PathPoly()
    for cyc, c in w.terms.items():
        for k, name in enumerate(cyc):
            if name == a:
                out.add(cyc[k + 1:] + cyc[:k], c)
    return out


@dataclass(frozen=True)
class Cut:
    arrows: frozenset[str]

    @classmethod
    def of(cls, names: Iterable[str]) -> Cut:
        return cls(frozenset(names))

    def validate(self, w: Potential) -> None:
        for name in self.arrows:
            w.quiver.arrow(name)
        for cyc in w.terms:
            hits = [n for n in cyc if n in self.arrows]
            if len(hits) != 1:
                raise InvalidCut(
                    f"cycle {render_path(cyc)} contains {len(hits)} cut-arrow occurrences, expected 1")

    def is_valid(self, w: Potential) -> bool:
        try:
            self.validate(w)
        except InvalidCut:
            return False
        return True

    def grading(self, q: Quiver) -> dict[str, int]:
        return {a.name: int(a.name in self.arrows) for a in q.arrows}


def cut_relations(w: Potential, s: Cut) -> dict[str, PathPoly]:
    """The relations p_a (a in S) with W = sum a p_a up to rotation."""
    s.validate(w)
    rels = {a.name: cyclic_derivative(w, a.name) for a in w.quiver.arrows if a.name in s.arrows}
    for a, rel in rels.items():
        for path in rel:
            if any(n in s.arrows for n in path):
                raise InvalidCut(f"relation for {a} involves a cut arrow")
    rebuilt = Potential.build(w.quiver, [(c, (a,) + path) for a, rel in rels.items() for path, c in rel.items()])
    if rebuilt != w:
        raise InvalidCut("cut relations do not reassemble the potential")
    return rels


@dataclass(frozen=True)
class SpConstraint:
    """Arrows that must be sent to invertible matrices."""

    invertible_arrows: frozenset[str] = frozenset()

    def check(self, q: Quiver, g: DimVector) -> None:
        for name in sorted(self.invertible_arrows):
            a = q.arrow(name)
            if g[q.vertex_index(a.source)] != g[q.vertex_index(a.target)]:
                raise QuiverError(f"invertible arrow {name} is not square at {g}")

    def admissible(self, q: Quiver, g: DimVector) -> bool:
        try:
            self.check(q, g)
        except QuiverError:
            return False
        return True

"""Quiver spec files (JSON) and the power-sum element grammar."""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .polyalg import Alphabet, MPoly, power_sum
from .quiver import Cut, DimVector, Potential, Quiver, QuiverError, SpConstraint


class SpecError(ValueError):
    """Malformed spec file or element expression."""


@dataclass(frozen=True)
class Spec:
    name: str
    quiver: Quiver
    potential: Potential | None
    cut: Cut | None
    sp: SpConstraint


def bundled() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("qcoha.data").iterdir() if p.name.endswith(".json"))


def read_text(ref: str) -> tuple[str, str]:
    path = Path(ref)
    if path.is_file():
        return path.stem, path.read_text()
    if ref in bundled():
        return ref, resources.files("qcoha.data").joinpath(ref + ".json").read_text()
    raise SpecError(f"no spec file or bundled spec named {ref!r} (bundled: {', '.join(bundled())})")


def parse_spec(text: str, name: str = "spec") -> Spec:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{name}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(raw, dict):
        raise SpecError(f"{name}: top level must be an object")
    try:
        q = Quiver.build(raw["vertices"], [(a["name"], a["from"], a["to"]) for a in raw.get("arrows", [])])
        pot = None
        if raw.get("potential"):
            pot = Potential.build(q, [(Fraction(str(t["coeff"])), t["cycle"]) for t in raw["potential"]])
        cut = Cut.of(raw["cut"]) if "cut" in raw else None
        sp = SpConstraint(frozenset(raw.get("sp", {}).get("invertible", [])))
        for a in sp.invertible_arrows:
            q.arrow(a)
        if cut is not None:
            for a in cut.arrows:
                q.arrow(a)
    except (KeyError, TypeError) as e:
        raise SpecError(f"{name}: missing or malformed field {e}") from None
    except (QuiverError, ValueError, ZeroDivisionError) as e:
        raise SpecError(f"{name}: {e}") from None
    return Spec(name, q, pot, cut, sp)


def load_spec(ref: str) -> Spec:
    name, text = read_text(ref)
    return parse_spec(text, name)


def parse_dim(q: Quiver, text: str) -> DimVector:
    try:
        parts = [int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip()]
    except ValueError:
        raise SpecError(f"dimension vector {text!r} is not a comma-separated list of integers") from None
    if len(parts) != q.n:
        raise SpecError(f"dimension vector {text!r} needs {q.n} entries")
    if any(x < 0 for x in parts):
        raise SpecError(f"dimension vector {text!r} has a negative entry")
    return DimVector(tuple(parts))


def parse_element(text: str, alph: Alphabet, slot: int = 1) -> MPoly:
    """Polynomial in power sums p[i,k]; i is a vertex name or 1-based position."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as e:
        raise SpecError(f"cannot parse {text!r} at column {e.offset}: {e.msg}") from None
    out = _Eval(alph, slot).visit(tree.body)
    return out if isinstance(out, MPoly) else MPoly.constant(alph, out)


class _Eval(ast.NodeVisitor):
    def __init__(self, alph: Alphabet, slot: int):
        self.alph, self.slot = alph, slot

    def generic_visit(self, node):
        raise SpecError(f"unsupported syntax {type(node).__name__} in element expression")

    def visit_Constant(self, node):
        if isinstance(node.value, int) and not isinstance(node.value, bool):
            return Fraction(node.value)
        raise SpecError(f"unsupported constant {node.value!r}")

    def visit_UnaryOp(self, node):
        v = self.visit(node.operand)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        return self.generic_visit(node)

    def visit_BinOp(self, node):
        a, b = self.visit(node.left), self.visit(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            if not isinstance(b, Fraction):
                raise SpecError("division is only allowed by a rational constant")
            if b == 0:
                raise SpecError("division by zero")
            return a * (1 / b)
        if isinstance(node.op, ast.Pow):
            if not isinstance(b, Fraction) or b.denominator != 1 or b < 0:
                raise SpecError("exponents must be nonnegative integers")
            return a ** int(b)
        return self.generic_visit(node)

    def visit_Subscript(self, node):
        if not (isinstance(node.value, ast.Name) and node.value.id == "p"):
            raise SpecError("only power sums p[i,k] may be indexed")
        idx = node.slice
        if not (isinstance(idx, ast.Tuple) and len(idx.elts) == 2):
            raise SpecError("power sums take two indices, p[i,k]")
        vi, ki = idx.elts
        if not isinstance(ki, ast.Constant) or not isinstance(ki.value, int) or ki.value < 1:
            raise SpecError("the power in p[i,k] must be a positive integer")
        vertex = self._vertex(vi)
        return power_sum(self.alph, self.slot, vertex, ki.value)

    def _vertex(self, node) -> int:
        verts = self.alph.vertices
        key = node.id if isinstance(node, ast.Name) else getattr(node, "value", None)
        if str(key) in verts:
            return verts.index(str(key))
        if isinstance(key, int) and 1 <= key <= len(verts):
            return key - 1
        raise SpecError(f"unknown vertex {key!r} in power sum")

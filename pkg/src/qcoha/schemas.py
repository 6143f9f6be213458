"""JSON Schemas for the ``--format json`` output of each subcommand."""

from __future__ import annotations

import jsonschema

_STR = {"type": "string"}
_INT = {"type": "integer"}
_BOOL = {"type": "boolean"}
_DIM = {"type": "string", "pattern": r"^\(-?\d+(,-?\d+)*\)$"}


def _obj(required: dict, optional: dict | None = None) -> dict:
    props = {"seed": _INT, **required, **(optional or {})}
    return {"type": "object", "properties": props, "required": ["seed", *required], "additionalProperties": False}


_CONVENTION = _obj({"sign_rule": {"enum": ["none", "l0", "chi"]},
                    "delta_kernel": {"enum": ["naive", "eue_ratio"]}})
_CONVENTION["required"].remove("seed")
_CONVENTION["properties"].pop("seed")

_RECORD = {
    "type": "object",
    "properties": {"q": _INT, "gamma": _DIM, "raw_count": _INT, "group_order": _INT,
                   "stack_count": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}, "enumerated": _INT},
    "required": ["q", "gamma", "raw_count", "group_order", "stack_count", "enumerated"],
    "additionalProperties": False,
}

_CHECK_RESULT = {
    "type": "object",
    "properties": {
        "check": {"enum": ["bialgebra", "coassoc", "counit", "involution", "linearity"]},
        "quiver": _STR, "passed": _BOOL, "trials": _INT, "failures": _INT,
        "convention": _CONVENTION,
        "sample": {"type": "object"},
        "counterexample": {"type": ["object", "null"]},
    },
    "required": ["check", "quiver", "passed", "trials", "failures", "convention", "counterexample"],
}

SCHEMAS: dict[str, dict] = {
    "info": _obj({
        "command": {"const": "info"}, "spec": _STR,
        "vertices": {"type": "array", "items": _STR},
        "arrows": {"type": "array", "items": {"type": "object", "required": ["name", "from", "to"]}},
        "b_matrix": {"type": "array", "items": {"type": "array", "items": _INT}},
        "symmetric": _BOOL,
        "potential": {"type": ["string", "null"]},
        "cut": {"type": ["array", "null"], "items": _STR},
        "cut_valid": {"type": ["boolean", "null"]},
        "relations": {"type": ["object", "null"], "additionalProperties": _STR},
        "invertible": {"type": "array", "items": _STR},
    }, {"cut_error": _STR}),
    "mul": _obj({"command": {"const": "mul"}, "gamma": _DIM, "product": _STR},
                {"coh_degrees": {"type": "array", "items": _INT}}),
    "delta": _obj({
        "command": {"const": "delta"}, "convention": _CONVENTION,
        "components": {"type": "array", "items": {
            "type": "object",
            "properties": {"slots": {"type": "array", "items": _DIM, "minItems": 2, "maxItems": 2},
                           "numerator": _STR, "denominator": _STR},
            "required": ["slots", "numerator", "denominator"], "additionalProperties": False}},
    }),
    "check": _obj({"command": {"const": "check"}, "passed": _BOOL,
                   "results": {"type": "array", "items": _CHECK_RESULT, "minItems": 1}}),
    "dt": _obj({
        "command": {"const": "dt"}, "gamma_max": _INT, "t_order": _INT,
        "variable": {"enum": ["t", "q+", "q-"]},
        "omega": {"type": "object", "additionalProperties": _STR},
        "positivity": {"type": "object", "required": ["clean", "negatives"]},
    }),
    "count": _obj({"command": {"const": "count"}, "gamma": _DIM,
                   "records": {"type": "array", "items": _RECORD}},
                  {"degree_bound": _INT, "holdout": {"oneOf": [_RECORD, {"type": "null"}]},
                   "holdout_ok": {"type": ["boolean", "null"]}, "integral": _BOOL, "polynomial": _STR}),
}


def validate(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` unless ``doc`` matches its command's schema."""
    cmd = doc.get("command")
    if cmd not in SCHEMAS:
        raise jsonschema.ValidationError(f"unknown command {cmd!r}")
    jsonschema.validate(doc, SCHEMAS[cmd])

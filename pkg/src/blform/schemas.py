"""JSON schemas for command-line inputs and outputs, plus the output encoder.

Rationals travel as strings (``"p/q"`` or ``"p"``); inputs also accept
integers and decimal strings.  Floats only appear in estimator output.
"""

from __future__ import annotations

import json
import math
import re

import jsonschema

__all__ = ["INPUT_SCHEMAS", "OUTPUT_SCHEMAS", "validate", "dumps"]

RATIONAL_IN = {
    "anyOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*[-+]?(\d+(\s*/\s*[1-9]\d*)?|\d*\.\d+)\s*$"},
    ]
}
RATIONAL_OUT = {"type": "string", "pattern": r"^-?\d+(/[1-9]\d*)?$"}
NUMBER_IN = {"anyOf": [{"type": "number"}, RATIONAL_IN]}
INDEX_LIST = {"type": "array", "items": {"type": "integer", "minimum": 0}, "uniqueItems": True}
FLOAT_OR_NULL = {"type": ["number", "null"]}

MATROID_IN = {
    "type": "object",
    "required": ["vectors"],
    "properties": {
        "dimension": {"type": "integer", "minimum": 0},
        "vectors": {"type": "array", "minItems": 1, "items": {"type": "array", "items": RATIONAL_IN}},
    },
}
MATROID_OUT = {
    "type": "object",
    "required": ["dimension", "vectors"],
    "properties": {
        "dimension": {"type": "integer"},
        "vectors": {"type": "array", "items": {"type": "array", "items": RATIONAL_OUT}},
    },
}
FUNCTION_IN = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["gaussian", "disk", "cauchy", "conj_cauchy"]},
        "dim": {"enum": [1, 2]},
        "width": NUMBER_IN,
        "radius": NUMBER_IN,
        "center": {"type": "array", "items": NUMBER_IN},
        "amplitude": NUMBER_IN,
    },
}


def _with_source(**props) -> dict:
    """Schema for inputs naming a matroid inline or as a family member ``n``."""
    return {
        "type": "object",
        "properties": {
            "matroid": MATROID_IN,
            "family": {"type": "integer", "minimum": 1},
            "max_n": {"type": "integer", "minimum": 1},
            **props,
        },
        "oneOf": [{"required": ["matroid"]}, {"required": ["family"]}],
        "required": list(props),
    }


_SOURCE_ONLY = {
    "type": "object",
    "properties": {
        "matroid": MATROID_IN,
        "family": {"type": "integer", "minimum": 1},
        "max_n": {"type": "integer", "minimum": 1},
    },
    "oneOf": [{"required": ["matroid"]}, {"required": ["family"]}],
}

_MC = {
    "samples": {"type": "integer", "minimum": 2},
    "seed": {"type": "integer", "minimum": 0},
    "radius": NUMBER_IN,
}
LAMBDA_IN = {
    "type": "object",
    "required": ["n", "t", "q"],
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "t": FUNCTION_IN,
        "q": {"type": "array", "items": FUNCTION_IN},
        **_MC,
    },
}
GENERAL_IN = {
    "type": "object",
    "required": ["vectors", "functions"],
    "properties": {
        "ell": {"enum": [1, 2]},
        "vectors": {"type": "array", "minItems": 1, "items": {"type": "array", "items": RATIONAL_IN}},
        "functions": {"type": "array", "items": FUNCTION_IN},
        **_MC,
    },
}

INPUT_SCHEMAS = {
    "rank": _with_source(subset=INDEX_LIST),
    "closure": _with_source(subset=INDEX_LIST),
    "bases": _SOURCE_ONLY,
    "flats": _SOURCE_ONLY,
    "vertices": _SOURCE_ONLY,
    "membership": _with_source(theta={"type": "array", "items": RATIONAL_IN}),
    "margin": _with_source(theta={"type": "array", "items": RATIONAL_IN}),
    "constant": _with_source(ell={"type": "integer", "minimum": 1}),
    "family-build": {
        "type": "object",
        "required": ["n"],
        "properties": {"n": {"type": "integer"}, "max_n": {"type": "integer", "minimum": 1}},
    },
    "family-verify": {
        "type": "object",
        "required": ["n"],
        "properties": {
            "n": {"type": "integer"},
            "delta": RATIONAL_IN,
            "samples": {"type": "integer", "minimum": 1},
            "seg_samples": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer", "minimum": 0},
            "max_n": {"type": "integer", "minimum": 1},
        },
    },
    "estimate": {"oneOf": [LAMBDA_IN, GENERAL_IN]},
    "verify-estimate": {
        "allOf": [LAMBDA_IN, {"type": "object", "properties": {"p_recip": RATIONAL_IN}}],
    },
}

VIOLATION_OUT = {
    "oneOf": [
        {
            "type": "object",
            "required": ["kind", "subset", "rank", "theta_sum"],
            "properties": {
                "kind": {"const": "rank"},
                "subset": INDEX_LIST,
                "rank": {"type": "integer", "minimum": 0},
                "theta_sum": RATIONAL_OUT,
            },
        },
        {
            "type": "object",
            "required": ["kind", "sum", "k"],
            "properties": {"kind": {"const": "hyperplane"}, "sum": RATIONAL_OUT, "k": {"type": "integer"}},
        },
        {
            "type": "object",
            "required": ["kind", "index", "value"],
            "properties": {"kind": {"const": "box"}, "index": {"type": "integer"}, "value": RATIONAL_OUT},
        },
    ]
}
VERDICT_OUT = {
    "oneOf": [
        {
            "type": "object",
            "required": ["member", "margin"],
            "properties": {"member": {"const": True}, "margin": RATIONAL_OUT},
            "additionalProperties": False,
        },
        {
            "type": "object",
            "required": ["member", "violation"],
            "properties": {"member": {"const": False}, "violation": VIOLATION_OUT},
            "additionalProperties": False,
        },
    ]
}
ESTIMATE_OUT = {
    "type": "object",
    "required": ["value", "stderr", "samples", "seed", "method", "warnings"],
    "properties": {
        "value": {"type": "number"},
        "stderr": {"type": "number", "minimum": 0},
        "samples": {"type": "integer"},
        "seed": {"type": "integer"},
        "method": {"enum": ["monte-carlo", "tensor-quadrature", "closed-form"]},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "real": {"type": "number"},
        "imag": {"type": "number"},
    },
}
P_DELTA_OUT = {
    "type": "object",
    "required": ["delta", "samples", "violations"],
    "properties": {
        "delta": RATIONAL_OUT,
        "samples": {"type": "integer"},
        "violations": {"type": "integer", "minimum": 0},
        "min_margin": {"anyOf": [RATIONAL_OUT, {"type": "null"}]},
        "certificates": {"type": "array"},
    },
}

OUTPUT_SCHEMAS = {
    "rank": {
        "type": "object",
        "required": ["subset", "rank"],
        "properties": {"subset": INDEX_LIST, "rank": {"type": "integer", "minimum": 0}},
    },
    "closure": {
        "type": "object",
        "required": ["subset", "closure"],
        "properties": {"subset": INDEX_LIST, "closure": INDEX_LIST},
    },
    "bases": {
        "type": "object",
        "required": ["count", "bases"],
        "properties": {"count": {"type": "integer"}, "bases": {"type": "array", "items": INDEX_LIST}},
    },
    "flats": {
        "type": "object",
        "required": ["count", "flats"],
        "properties": {
            "count": {"type": "integer"},
            "flats": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["subset", "rank"],
                    "properties": {"subset": INDEX_LIST, "rank": {"type": "integer"}},
                },
            },
        },
    },
    "membership": VERDICT_OUT,
    "margin": {"type": "object", "required": ["margin"], "properties": {"margin": RATIONAL_OUT}},
    "vertices": {
        "type": "object",
        "required": ["count", "vertices"],
        "properties": {
            "count": {"type": "integer"},
            "vertices": {"type": "array", "items": {"type": "array", "items": RATIONAL_OUT}},
        },
    },
    "constant": {
        "type": "object",
        "required": ["ell", "constant"],
        "properties": {"ell": {"type": "integer"}, "constant": RATIONAL_OUT},
    },
    "family-build": {
        "type": "object",
        "required": ["n", "k", "m", "ell", "matroid"],
        "properties": {
            "n": {"type": "integer"},
            "k": {"type": "integer"},
            "m": {"type": "integer"},
            "ell": {"const": 2},
            "matroid": MATROID_OUT,
        },
    },
    "family-verify": {
        "type": "object",
        "required": ["n", "bases", "all_unit_det", "p_delta", "seg_est_min_slack", "ok"],
        "properties": {
            "n": {"type": "integer"},
            "bases": {"type": "integer"},
            "all_unit_det": {"type": "boolean"},
            "p_delta": P_DELTA_OUT,
            "seg_est_min_slack": RATIONAL_OUT,
            "interior_margin": RATIONAL_OUT,
            "ok": {"type": "boolean"},
        },
    },
    "estimate": ESTIMATE_OUT,
    "verify-estimate": {
        "type": "object",
        "required": ["n", "p_recip", "estimate", "norm_product", "ratio", "ratio_stderr", "per_step"],
        "properties": {
            "n": {"type": "integer"},
            "p_recip": RATIONAL_OUT,
            "estimate": ESTIMATE_OUT,
            "norm_product": {"type": "number"},
            "ratio": FLOAT_OR_NULL,
            "ratio_stderr": FLOAT_OR_NULL,
            "per_step": FLOAT_OR_NULL,
        },
    },
}


def validate(instance, schema) -> None:
    """Raise :class:`jsonschema.ValidationError` if ``instance`` does not match."""
    jsonschema.validate(instance, schema)


_FLOAT_TAG = re.compile(r'"\\u0000F([^"\\]*)\\u0000"')


def _tag_floats(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return f"\x00F{obj:.17g}\x00"
    if isinstance(obj, dict):
        return {k: _tag_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_tag_floats(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):  # numpy scalars
        return _tag_floats(obj.item())
    return obj


def dumps(obj, indent: int | None = 2) -> str:
    """JSON text with every float written to 17 significant digits (non-finite as null)."""
    text = json.dumps(_tag_floats(obj), indent=indent)
    return _FLOAT_TAG.sub(lambda m: _as_json_number(m.group(1)), text)


def _as_json_number(s: str) -> str:
    # keep floats recognisable as floats after a round trip
    return s if any(c in s for c in ".en") else s + ".0"

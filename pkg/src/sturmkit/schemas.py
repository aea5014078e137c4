"""JSON Schemas (draft 2020-12) for every JSON document the CLI writes."""

from __future__ import annotations

_NUM = {"type": "number"}
_OPT_NUM = {"type": ["number", "null"]}
_BOOL = {"type": "boolean"}
_NUMS = {"type": "array", "items": _NUM}
_OPT_NUMS = {"type": "array", "items": _OPT_NUM}


def _obj(props: dict, required=None) -> dict:
    return {"type": "object", "properties": props, "required": list(required or props),
            "additionalProperties": False}


# numbers in a potential spec may also be constant expressions such as "pi/2"; "to" may be "b"
_REAL = {"type": ["number", "string"]}

POTENTIAL = _obj({
    "a": _REAL,
    "b": _REAL,
    "pieces": {"type": "array", "minItems": 1, "items": {
        "type": "object",
        "properties": {"to": _REAL, "const": _REAL, "expr": {"type": "string"}},
        "required": ["to"],
        "oneOf": [{"required": ["const"]}, {"required": ["expr"]}],
        "additionalProperties": False,
    }},
})

SOLVE = _obj({
    "method": {"enum": ["exact", "numeric"]},
    "accuracy": _NUM,
    "t0": _NUM,
    "t_end": _NUM,
    "samples": {"type": "array", "items": _obj({"t": _NUM, "v": _NUM, "dv": _NUM})},
})

ZEROS = _obj({"a": _NUM, "b": _NUM, "count": {"type": "integer", "minimum": 0},
              "zeros": _NUMS, "interior_zeros": _NUMS})

DISCONJUGATE = _obj({"a": _NUM, "b": _NUM, "disconjugate": _BOOL,
                     "first_conjugate_point": _OPT_NUM, "witness_theta": _OPT_NUM})

SCT = _obj({
    "outcome": {"enum": ["holds", "fails", "not-applicable"]},
    "a": _OPT_NUM,
    "b": _OPT_NUM,
    "witness_theta": _OPT_NUM,
    "disconjugate": {"type": ["boolean", "null"]},
    "diagnostics": {"type": "object"},
})

THEOREM1 = _obj({
    "epsilon": _NUM, "lambda": _NUM, "c1": _NUM, "c2": _NUM,
    "f_lower_bound": _OPT_NUM, "f_tail_min": _NUM, "g_sup_bound": _NUM, "g_tail_max": _NUM,
    "t_min": _NUM, "min_v": _NUM, "zero_count": {"type": "integer", "minimum": 0},
    "zero_free": _BOOL, "sct_fails": _BOOL, "epsilon0": _NUM, "lambda_threshold": _OPT_NUM,
})

TRACK_ZERO = _obj({"lambda": _NUMS, "t0": _OPT_NUMS, "dt0_dlambda": _OPT_NUMS, "exit_lambda": _OPT_NUM})

EPSILON0 = _obj({"epsilon0": _NUM, "residual": _NUM})

PROPERTY_SWEEP = _obj({
    "seed": {"type": "integer"},
    "count": {"type": "integer"},
    "suites": {"type": "array", "items": _obj({"name": {"type": "string"},
                                               "passed": {"type": "integer"},
                                               "failed": {"type": "integer"}})},
    "all_passed": _BOOL,
})

BY_COMMAND = {
    "solve": SOLVE,
    "zeros": ZEROS,
    "disconjugate": DISCONJUGATE,
    "sct": SCT,
    "theorem1": THEOREM1,
    "track-zero": TRACK_ZERO,
    "epsilon0": EPSILON0,
    "construct": POTENTIAL,
    "property-sweep": PROPERTY_SWEEP,
}

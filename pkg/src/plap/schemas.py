"""Published JSON schemas for the CLI configuration files.

Every config carries a ``schema_version`` field; unknown keys are
rejected so that typos cannot silently change an experiment.
"""

_PARAMS = {
    "type": "object",
    "properties": {
        "p": {"type": "number"},
        "n": {"type": "integer", "minimum": 1},
        "c": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["p", "n"],
    "additionalProperties": False,
}

_POLE = {
    "type": "object",
    "properties": {
        "weight": {"type": "number", "minimum": 0},
        "location": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    },
    "required": ["weight", "location"],
    "additionalProperties": False,
}

_CONCAVE = {
    "$id": "concave_term",
    "type": "object",
    "properties": {
        "kind": {"enum": ["zero", "quadratic", "affine_min", "mollified"]},
        "a_matrix": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
        "b": {"type": "array", "items": {"type": "number"}},
        "c0": {"type": "number"},
        "slopes": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
        "offsets": {"type": "array", "items": {"type": "number"}},
        "base": {"$ref": "concave_term"},
        "delta": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

SCHEMAS = {
    "eval": {
        "type": "object",
        "properties": {
            "schema_version": {"const": 1},
            "params": _PARAMS,
            "poles": {"type": "array", "items": _POLE, "minItems": 1},
            "concave": _CONCAVE,
            "points": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}},
                "minItems": 1,
            },
            "fd_step": {"type": "number", "exclusiveMinimum": 0},
        },
        "required": ["schema_version", "params", "poles", "points"],
        "additionalProperties": False,
    },
    "sign_map": {
        "type": "object",
        "properties": {
            "schema_version": {"const": 1},
            "p_min": {"type": "number"},
            "p_max": {"type": "number"},
            "p_step": {"type": "number", "exclusiveMinimum": 0},
            "n_min": {"type": "integer", "minimum": 1},
            "n_max": {"type": "integer", "minimum": 1},
        },
        "required": ["schema_version", "p_min", "p_max", "p_step", "n_min", "n_max"],
        "additionalProperties": False,
    },
    "compare": {
        "type": "object",
        "properties": {
            "schema_version": {"const": 1},
            "params": _PARAMS,
            "poles": {"type": "array", "items": _POLE, "minItems": 1},
            "concave": _CONCAVE,
            "grid": {
                "type": "object",
                "properties": {
                    "bounds": {
                        "type": "array",
                        "items": {
                            "type": "array",
                            "items": {"type": "number"},
                            "minItems": 2,
                            "maxItems": 2,
                        },
                    },
                    "shape": {"type": "array", "items": {"type": "integer", "minimum": 9}},
                },
                "required": ["bounds", "shape"],
                "additionalProperties": False,
            },
            "shift": {"type": "number"},
            "tol": {"type": "number", "exclusiveMinimum": 0},
        },
        "required": ["schema_version", "params", "poles", "grid"],
        "additionalProperties": False,
    },
    "evolution_sweep": {
        "type": "object",
        "properties": {
            "schema_version": {"const": 1},
            "kernel": {
                "type": "object",
                "properties": {
                    "kind": {"enum": ["barenblatt", "homogeneous"]},
                    "p": {"type": "number", "exclusiveMinimum": 2},
                    "n": {"type": "integer", "minimum": 1},
                    "big_c": {"type": "number", "exclusiveMinimum": 0},
                    "small_c": {"type": "number", "exclusiveMinimum": 0},
                },
                "required": ["kind", "p", "n"],
                "additionalProperties": False,
            },
            "t": {"type": "number", "exclusiveMinimum": 0},
            "a": {"type": "number", "exclusiveMinimum": 0},
            "radii": {
                "type": "object",
                "properties": {
                    "min": {"type": "number", "minimum": 0},
                    "max": {"type": "number", "exclusiveMinimum": 0},
                    "count": {"type": "integer", "minimum": 2},
                },
                "required": ["min", "max", "count"],
                "additionalProperties": False,
            },
            "y": {"type": "array", "items": {"type": "number"}},
            "times": {
                "type": "object",
                "properties": {
                    "min": {"type": "number", "exclusiveMinimum": 0},
                    "max": {"type": "number", "exclusiveMinimum": 0},
                    "count": {"type": "integer", "minimum": 2},
                },
                "required": ["min", "max", "count"],
                "additionalProperties": False,
            },
        },
        "required": ["schema_version", "kernel"],
        "additionalProperties": False,
    },
}

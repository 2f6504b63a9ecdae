"""
JSON schema for validating the flat YAML experiment configuration.
"""

from jsonschema import validate, ValidationError

_POSITIVE_INT_LIST = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "nodes": {
            "oneOf": [
                {"type": "integer", "minimum": 2},
                {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1}
            ]
        },
        "degree_coeff": {"type": "number", "exclusiveMinimum": 1},
        "gain": {"type": "number", "exclusiveMinimum": 1},
        "exponents": {
            "type": "array",
            "items": {"type": "number", "minimum": 0, "maximum": 1},
            "minItems": 1
        },
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 18446744073709551615},
        "workers": {"type": "integer", "minimum": 1},
        "alphabet": {"type": "integer", "minimum": 2},
        "seq_len": _POSITIVE_INT_LIST,
        "mem_len": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "epsilon": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "sources": {"type": "integer", "minimum": 20},
        "draws": {"type": "integer", "minimum": 1},
        "memory_mode": {"type": "string", "enum": ["fresh", "fixed"]},
        "format": {"type": "string", "enum": ["csv", "json"]},
        "out": {"type": ["string", "null"]}
    },
    "additionalProperties": False
}


def validate_config(config: dict) -> None:
    """Validate an experiment config mapping against the schema."""
    try:
        validate(instance=config, schema=CONFIG_SCHEMA)
    except ValidationError as e:
        raise ValueError(f"Invalid experiment config: {e.message}") from e

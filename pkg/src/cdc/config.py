"""Scenario configuration schema and validation."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .errors import ConfigError
from .zoo import FAMILIES

SCHEMA_VERSION = "1.0"

MARKOV_SUITES = ("axioms", "curvature", "meyer", "hgs", "john-nirenberg", "duality",
                 "shifted-derivative", "cross-term", "hypotheses", "norm-equivalence",
                 "averaging", "poisson", "carleson", "duality-sweep", "equivalence-sweep")
GROUP_SUITES = ("conditional-negativity", "curvature", "gromov", "kadison-schwarz",
                "two-convexity", "abelian", "norms", "group-duality", "group-hypotheses")
# numbered names accepted on the command line and in configs
SUITE_ALIASES = {"theorem01": "duality", "lemma21": "shifted-derivative", "lemma22": "cross-term",
                 "theorem02": "norm-equivalence", "theorem01-sweep": "duality-sweep",
                 "theorem02-sweep": "equivalence-sweep", "theorem31": "group-duality",
                 "theorem32": "group-hypotheses"}
SUITE_NAMES = sorted(set(MARKOV_SUITES) | set(GROUP_SUITES) | set(SUITE_ALIASES) | {"all"})
# "all" for the Markov backend skips the multi-size sweeps, which ignore the generator
MARKOV_ALL = MARKOV_SUITES[:-2]

_number_list = {"type": "array", "items": {"type": "number"}}

GENERATOR_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "additionalProperties": False,
    "properties": {
        "type": {"enum": list(FAMILIES)},
        "n": {"type": "integer", "minimum": 1},
        "mu": {"anyOf": [{"enum": ["uniform", "random"]}, _number_list]},
        "seed": {"type": "integer"},
        "rate": {"type": "number", "exclusiveMinimum": 0},
        "Q": {"type": "array", "items": {"anyOf": [{"type": "number"}, _number_list]}},
        "births": _number_list,
        "deaths": _number_list,
        "density": {"type": "number", "minimum": 0, "maximum": 1},
    },
}

PSI_SCHEMA = {
    "anyOf": [
        {"enum": ["word-length", "indicator", "cocycle"]},
        _number_list,
        {"type": "object", "required": ["type"], "additionalProperties": False,
         "properties": {"type": {"enum": ["word-length", "indicator", "cocycle", "table"]},
                        "generators": {"type": "array", "items": {"type": "integer"}},
                        "vector": _number_list, "values": _number_list,
                        "seed": {"type": "integer"}, "scale": {"type": "number"}}},
    ]
}

GROUP_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "additionalProperties": False,
    "properties": {
        "type": {"enum": ["cyclic", "dihedral", "symmetric", "quaternion", "product", "table"]},
        "n": {"type": "integer", "minimum": 1},
        "orders": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "psi": PSI_SCHEMA,
    },
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "cdc scenario",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "schemaVersion": {"const": SCHEMA_VERSION},
        "backend": {"enum": ["markov", "group"]},
        "generator": GENERATOR_SCHEMA,
        "group": GROUP_SCHEMA,
        "suites": {"type": "array", "minItems": 1,
                   "items": {"enum": SUITE_NAMES}},
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "grid": {"type": "object", "additionalProperties": False,
                 "properties": {"pointsPerDecade": {"type": "integer", "minimum": 1}}},
        "families": {"type": "array", "items": {"enum": list(FAMILIES)}},
        "sizes": {"type": "array", "items": {"type": "integer", "minimum": 2}},
        "tolerances": {"type": "object", "additionalProperties": False,
                       "properties": {"meyer": {"type": "number", "exclusiveMinimum": 0},
                                      "hgs": {"type": "number", "exclusiveMinimum": 0},
                                      "poisson": {"type": "number", "exclusiveMinimum": 0}}},
        "curves": {"type": "boolean"},
        "output": {"type": "string"},
    },
    "allOf": [
        {"if": {"properties": {"backend": {"const": "group"}}, "required": ["backend"]},
         "then": {"required": ["group"]},
         "else": {"required": ["generator"]}},
    ],
}


def _field_path(error: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in error.absolute_path)
    if error.validator == "additionalProperties":
        extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        path = ".".join(p for p in (path, extra[0] if extra else "") if p)
    elif error.validator == "required":
        missing = [r for r in error.validator_value if r not in error.instance]
        path = ".".join(p for p in (path, missing[0] if missing else "") if p)
    return path or "<root>"


def validate_config(config) -> dict:
    """Validate a scenario mapping; raise ConfigError naming the offending field."""
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: (len(e.path), str(e.path)))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise ConfigError(best.message, _field_path(best))
    cfg = dict(config)
    cfg.setdefault("backend", "markov")
    cfg.setdefault("seed", 0)
    cfg.setdefault("suites", ["all"])
    cfg["suites"] = [SUITE_ALIASES.get(name, name) for name in cfg["suites"]]
    known = MARKOV_SUITES if cfg["backend"] == "markov" else GROUP_SUITES
    for name in cfg["suites"]:
        if name != "all" and name not in known:
            raise ConfigError(f"suite {name!r} is not available for the {cfg['backend']} backend",
                              "suites")
    return cfg


def load_config(path) -> dict:
    try:
        with open(Path(path)) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", "<file>") from exc
    return validate_config(data)

"""Instance files: JSON schema, loading, and the bundled examples."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .errors import InvalidInstance, JoinDegError
from .fields import Field, field_from_json
from .join import JoinInstance
from .oracle import DEFAULT_BUDGET
from .variety import ParamVariety

SCHEMA_VERSION = 1
DEFAULT_ORACLE_PRIMES = (11, 31)

_VARIETY_SCHEMA = {
    "type": "object",
    "properties": {
        "label": {"type": "string"},
        "source_dim": {"type": "integer", "minimum": 0, "maximum": 2},
        "components": {"type": "array", "items": {"type": "string"}, "minItems": 2},
    },
    "required": ["source_dim", "components"],
    "additionalProperties": False,
}

INSTANCE_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "ambient": {"type": "integer", "minimum": 1},
        "field": {
            "oneOf": [
                {"const": "Q"},
                {
                    "type": "object",
                    "properties": {"p": {"type": "integer", "minimum": 2}},
                    "required": ["p"],
                    "additionalProperties": False,
                },
            ]
        },
        "X": _VARIETY_SCHEMA,
        "Y": _VARIETY_SCHEMA,
        "seed": {"type": "integer", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "oracle": {
            "type": "object",
            "properties": {
                "primes": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
                "budget": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "options": {
            "type": "object",
            "properties": {
                "arithmetic": {"enum": ["modular", "exact"]},
                "sample_box": {"type": "integer", "minimum": 2},
            },
            "additionalProperties": False,
        },
    },
    "required": ["ambient", "field", "X", "Y", "seed"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class InstanceSpec:
    """A loaded instance file: the join instance plus oracle settings."""

    instance: JoinInstance
    name: str = ""
    description: str = ""
    oracle_primes: tuple[int, ...] = DEFAULT_ORACLE_PRIMES
    oracle_budget: int = DEFAULT_BUDGET
    raw: dict = dc_field(default_factory=dict)

    @property
    def field(self) -> Field:
        return self.instance.field


def _schema_error_message(err: jsonschema.ValidationError) -> str:
    where = "/".join(str(p) for p in err.absolute_path) or "<root>"
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        return f"unknown key(s) {extra} at {where}"
    if err.validator == "required":
        return f"{err.message} at {where}"
    return f"invalid value at {where}: {err.message}"


def validate_instance_json(doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(INSTANCE_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise InvalidInstance(_schema_error_message(errors[0]))


def _variety(doc: dict, field: Field, ambient: int, which: str) -> ParamVariety:
    comps = doc["components"]
    if len(comps) != ambient + 1:
        raise InvalidInstance(f"{which} has {len(comps)} components, ambient P^{ambient} needs {ambient + 1}")
    try:
        return ParamVariety.from_strings(field, doc["source_dim"], comps, doc.get("label", which))
    except JoinDegError as exc:
        raise InvalidInstance(f"{which}: {type(exc).__name__}: {exc}") from exc


def instance_from_json(
    doc: dict,
    seed: int | None = None,
    trials: int | None = None,
    field_override: Field | None = None,
) -> InstanceSpec:
    """Build an InstanceSpec; explicit ``seed``/``trials``/``field_override`` win over the file."""
    validate_instance_json(doc)
    try:
        field = field_override or field_from_json(doc["field"])
    except (ValueError, JoinDegError) as exc:
        raise InvalidInstance(f"field: {exc}") from exc
    n = doc["ambient"]
    X = _variety(doc["X"], field, n, "X")
    Y = _variety(doc["Y"], field, n, "Y")
    opts = doc.get("options", {})
    inst = JoinInstance(
        X,
        Y,
        seed=doc["seed"] if seed is None else seed,
        trials=doc.get("trials", 3) if trials is None else trials,
        sample_box=opts.get("sample_box", 1000),
        name=doc.get("name", ""),
        arithmetic=opts.get("arithmetic", "modular"),
    )
    oracle = doc.get("oracle", {})
    default_primes = DEFAULT_ORACLE_PRIMES if field.char == 0 else (field.char,)
    return InstanceSpec(
        inst,
        doc.get("name", ""),
        doc.get("description", ""),
        tuple(oracle.get("primes", default_primes)),
        oracle.get("budget", DEFAULT_BUDGET),
        doc,
    )


def load_instance(path, **overrides) -> InstanceSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInstance(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"malformed JSON in {path}: {exc}") from exc
    return instance_from_json(doc, **overrides)


def instance_to_json(spec: InstanceSpec) -> dict:
    inst = spec.instance
    doc = {
        "schema": SCHEMA_VERSION,
        "name": spec.name,
        "ambient": inst.n,
        "field": inst.field.to_json(),
        "X": inst.X.to_json(),
        "Y": inst.Y.to_json(),
        "seed": inst.seed,
        "trials": inst.trials,
        "oracle": {"primes": list(spec.oracle_primes), "budget": spec.oracle_budget},
        "options": {"arithmetic": inst.arithmetic, "sample_box": inst.sample_box},
    }
    if spec.description:
        doc["description"] = spec.description
    return doc


# ---------------------------------------------------------------------------
# bundled examples


def _data_dir():
    return resources.files("joindeg") / "data"


def bundled_names() -> list[str]:
    return sorted(p.name[:-5] for p in _data_dir().iterdir() if p.name.endswith(".json"))


def bundled_path(name: str) -> Path:
    if not name.endswith(".json"):
        name += ".json"
    p = _data_dir() / name
    if not p.is_file():
        raise InvalidInstance(f"no bundled instance {name!r}; available: {bundled_names()}")
    return Path(str(p))


def load_bundled(name: str, **overrides) -> InstanceSpec:
    return load_instance(bundled_path(name), **overrides)

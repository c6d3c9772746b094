"""Input validation helpers shared by the estimator, the CLI and library callers."""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Any

from .errors import InvalidInstance
from .fields import Field, PrimeField, Rationals, field_from_json
from .instances import InstanceSpec, instance_from_json, load_instance
from .join import JoinInstance
from .variety import ParamVariety


def check_field(obj: Any) -> Field:
    """Accept a Field, "Q", a prime int, or {"p": prime}."""
    if isinstance(obj, Field):
        return obj
    if isinstance(obj, bool):
        raise InvalidInstance(f"not a field: {obj!r}")
    if isinstance(obj, int):
        return PrimeField(obj)
    if obj is None or obj == "Q":
        return Rationals()
    try:
        return field_from_json(obj)
    except ValueError as exc:
        raise InvalidInstance(str(exc)) from exc


def check_variety(obj: Any, field: Field | None = None, source_dim: int | None = None) -> ParamVariety:
    """Accept a ParamVariety, a {"source_dim", "components"} dict, or a list of component strings."""
    if isinstance(obj, ParamVariety):
        if field is not None and obj.field != field:
            raise InvalidInstance(f"variety over {obj.field}, expected {field}")
        return obj
    field = check_field(field)
    if isinstance(obj, dict):
        try:
            return ParamVariety.from_strings(field, obj["source_dim"], obj["components"], obj.get("label", ""))
        except KeyError as exc:
            raise InvalidInstance(f"variety dict is missing {exc}") from None
    if isinstance(obj, (list, tuple)) and all(isinstance(c, str) for c in obj):
        k = 1 if source_dim is None else source_dim
        return ParamVariety.from_strings(field, k, list(obj))
    raise InvalidInstance(f"cannot interpret {type(obj).__name__} as a parametrized variety")


def check_instance(obj: Any, Y: Any = None, field: Any = None, **params) -> InstanceSpec:
    """Normalize the accepted instance inputs to an InstanceSpec.

    ``obj`` may be an InstanceSpec, a JoinInstance, an instance JSON dict, a
    path, or X (with ``Y`` given separately as a variety-like object).
    Keyword ``params`` (seed, trials, sample_box, arithmetic) override.
    """
    params = {k: v for k, v in params.items() if v is not None}
    if Y is not None:
        f = check_field(field)
        X = check_variety(obj, f)
        Yv = check_variety(Y, X.field)
        return InstanceSpec(JoinInstance(X, Yv, **params))
    if isinstance(obj, InstanceSpec):
        spec = obj
    elif isinstance(obj, JoinInstance):
        spec = InstanceSpec(obj)
    elif isinstance(obj, dict):
        spec = instance_from_json(obj)
    elif isinstance(obj, (str, Path)):
        spec = load_instance(obj)
    else:
        raise InvalidInstance(f"cannot interpret {type(obj).__name__} as a join instance")
    if params:
        spec = replace(spec, instance=replace(spec.instance, **params))
    return spec

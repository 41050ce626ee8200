"""Run configuration: geometry, constraints and sweep settings in one JSON file.

Angles under ``constraints`` and ``sweep`` use the document's ``units``;
geometry values (including ``neutral_yaw``) are always radians and unit lengths.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources

import jsonschema

from .constraints import ConstraintParams
from .errors import ConfigError, InvalidGeometry
from .mechanism import MechanismGeometry, geometry_from_dict, geometry_to_dict
from .workspace import SweepParams

_NUM = {"type": "number"}
_VEC3 = {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3}

SCHEMA = {
    "type": "object",
    "required": ["format"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": 1},
        "units": {"enum": ["degrees", "radians"]},
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"const": 1},
                "variant": {"enum": ["parallel_actuators", "parallel_axes", "orthogonal_axes",
                                     "parallel-actuators", "parallel-axes", "orthogonal-axes"]},
                "a": _NUM, "b": _NUM, "c": _NUM,
                "rod_length": {"type": "number", "exclusiveMinimum": 0},
                "coupler_length": {"type": "number", "exclusiveMinimum": 0},
                "axes": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"i1": _VEC3, "i2": _VEC3, "home1": _VEC3, "home2": _VEC3},
                },
                "neutral_yaw": _NUM,
                "scale_mm": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "constraints": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lima": {"type": "number", "exclusiveMinimum": 0},
                "lima_b": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "lima_c": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "limd": {"type": "number", "minimum": 0},
                "clearance": {"type": "number", "minimum": 0},
                "samples_n": {"type": "integer", "minimum": 2},
                "singularity_margin": {"type": ["number", "null"], "minimum": 0},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_psi": {"type": "integer", "minimum": 2, "multipleOf": 2},
                "n_phi": {"type": "integer", "minimum": 3},
                "tilt_step": {"type": "number", "exclusiveMinimum": 0},
                "max_tilt": {"type": "number", "exclusiveMinimum": 0},
                "centroid_method": {"enum": ["area", "vertex"]},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"format": {"enum": ["csv", "json", "obj"]}},
        },
    },
}


_VALIDATOR = None


def _validator():
    # built once: jsonschema.validate re-checks the schema itself on every call
    global _VALIDATOR
    if _VALIDATOR is None:
        cls = jsonschema.validators.validator_for(SCHEMA)
        cls.check_schema(SCHEMA)
        _VALIDATOR = cls(SCHEMA)
    return _VALIDATOR


@dataclass(frozen=True)
class RunConfig:
    geometry: MechanismGeometry
    constraints: ConstraintParams
    sweep: SweepParams
    units: str = "degrees"
    output_format: str = "csv"


def default_document() -> dict:
    text = resources.files("eelwrist").joinpath("data/default.json").read_text()
    return json.loads(text)


def _angles(d: dict, keys, to_rad) -> dict:
    out = dict(d)
    for k in keys:
        if out.get(k) is not None:
            out[k] = to_rad(out[k])
    return out


def parse_config(doc: dict) -> RunConfig:
    """Validate ``doc`` against the schema and build the run objects."""
    exc = jsonschema.exceptions.best_match(_validator().iter_errors(doc))
    if exc is not None:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}")
    units = doc.get("units", "degrees")
    to_rad = math.radians if units == "degrees" else float
    try:
        g = geometry_from_dict(doc.get("geometry", {"format": 1}))
        cp = ConstraintParams(**_angles(doc.get("constraints", {}), ("lima", "lima_b", "lima_c"),
                                        to_rad))
        sp = SweepParams(**_angles(doc.get("sweep", {}), ("tilt_step", "max_tilt"), to_rad))
    except (InvalidGeometry, ConfigError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(g, cp, sp, units, doc.get("output", {}).get("format", "csv"))


def load_config(path=None) -> RunConfig:
    """Read a config file; ``None`` loads the shipped defaults."""
    if path is None:
        return parse_config(default_document())
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(doc)


def config_to_dict(cfg: RunConfig) -> dict:
    f = math.degrees if cfg.units == "degrees" else float
    c, s = cfg.constraints, cfg.sweep
    cons = {"lima": f(c.lima), "limd": c.limd, "clearance": c.clearance,
            "samples_n": c.samples_n}
    for k in ("lima_b", "lima_c"):
        if getattr(c, k) is not None:
            cons[k] = f(getattr(c, k))
    if c.singularity_margin is not None:
        cons["singularity_margin"] = c.singularity_margin
    return {
        "format": 1,
        "units": cfg.units,
        "geometry": copy.deepcopy(geometry_to_dict(cfg.geometry)),
        "constraints": cons,
        "sweep": {"n_psi": s.n_psi, "n_phi": s.n_phi, "tilt_step": f(s.tilt_step),
                  "max_tilt": f(s.max_tilt), "centroid_method": s.centroid_method},
        "output": {"format": cfg.output_format},
    }

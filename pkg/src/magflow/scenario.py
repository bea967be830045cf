"""Scenario files: JSON configuration with strict schema validation.

A scenario names a built-in manifold and magnetic 2-form, a speed, initial
conditions, integrator settings, and command-specific parameters.  Unknown
keys are rejected so that typos fail loudly before any computation runs.
"""
from __future__ import annotations

import json
from typing import Optional

import numpy as np
from jsonschema import Draft7Validator

from .errors import MagflowError
from .flow import IntegratorConfig, PhaseState
from .forms import FORMS, make_form
from .models import MANIFOLDS, make_manifold
from .system import MagneticSystem

__all__ = ["ScenarioInvalid", "load_scenario", "build_system", "build_state",
           "build_integrator", "SCHEMA"]


class ScenarioInvalid(MagflowError):
    """Scenario file failed schema validation (CLI exit code 2)."""


SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["manifold", "magnetic"],
    "properties": {
        "manifold": {
            "type": "object",
            "additionalProperties": False,
            "required": ["name"],
            "properties": {
                "name": {"enum": sorted(MANIFOLDS)},
                "params": {"type": "object"},
            },
        },
        "magnetic": {
            "type": "object",
            "additionalProperties": False,
            "required": ["name"],
            "properties": {
                "name": {"enum": sorted(FORMS)},
                "params": {"type": "object"},
            },
        },
        "speed": {"type": "number", "exclusiveMinimum": 0},
        "initial": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "x": {"type": "array", "items": {"type": "number"}},
                "v": {"type": "array", "items": {"type": "number"}},
            },
        },
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "method": {"enum": ["rk4", "rk45"]},
                "step": {"type": "number", "exclusiveMinimum": 0},
                "rtol": {"type": "number", "exclusiveMinimum": 0},
                "atol": {"type": "number", "exclusiveMinimum": 0},
                "renormalize_speed": {"type": "boolean"},
                "max_steps": {"type": "integer", "minimum": 1},
            },
        },
        "command": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "params": {"type": "object"},
    },
}

_validator = Draft7Validator(SCHEMA)


def load_scenario(path: str, command: Optional[str] = None) -> dict:
    """Parse and validate a scenario file.  Raises ScenarioInvalid with a
    message naming the offending field."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioInvalid(f"cannot read scenario {path!r}: {exc}")
    errs = sorted(_validator.iter_errors(data), key=lambda e: list(e.path))
    if errs:
        e = errs[0]
        where = "/".join(str(p) for p in e.path) or "(top level)"
        raise ScenarioInvalid(f"scenario field {where}: {e.message}")
    if command is not None and "command" in data and data["command"] != command:
        raise ScenarioInvalid(
            f"scenario field command: declared for {data['command']!r}, "
            f"invoked as {command!r}")
    return data


def build_system(sc: dict) -> MagneticSystem:
    man = sc["manifold"]
    try:
        chart, metric = make_manifold(man["name"], **man.get("params", {}))
    except TypeError as exc:
        raise ScenarioInvalid(f"scenario field manifold/params: {exc}")
    mag = sc["magnetic"]
    try:
        sigma = make_form(mag["name"], chart.dim, metric, chart,
                          **mag.get("params", {}))
    except TypeError as exc:
        raise ScenarioInvalid(f"scenario field magnetic/params: {exc}")
    return MagneticSystem(chart, metric, sigma)


def build_state(sc: dict, sys: MagneticSystem) -> PhaseState:
    init = sc.get("initial", {})
    if "x" not in init:
        raise ScenarioInvalid("scenario field initial/x: required")
    x = np.asarray(init["x"], dtype=float)
    if x.size != sys.dim:
        raise ScenarioInvalid(
            f"scenario field initial/x: expected {sys.dim} components")
    if "v" not in init:
        raise ScenarioInvalid("scenario field initial/v: required")
    v = np.asarray(init["v"], dtype=float)
    if v.size != sys.dim:
        raise ScenarioInvalid(
            f"scenario field initial/v: expected {sys.dim} components")
    s = float(sc.get("speed", 1.0))
    nrm = sys.metric.norm(x, v)
    if nrm == 0:
        raise ScenarioInvalid("scenario field initial/v: must be nonzero")
    return PhaseState(x=x, v=v * (s / nrm), s=s)


def build_integrator(sc: dict, default_step: float = 1e-3) -> IntegratorConfig:
    cfg = sc.get("integrator", {})
    return IntegratorConfig(
        method=cfg.get("method", "rk4"),
        step=float(cfg.get("step", default_step)),
        rtol=float(cfg.get("rtol", 1e-10)),
        atol=float(cfg.get("atol", 1e-12)),
        renormalize_speed=bool(cfg.get("renormalize_speed", False)),
        max_steps=int(cfg.get("max_steps", 10_000_000)),
    )

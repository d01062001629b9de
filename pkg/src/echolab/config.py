"""Run configuration: YAML files plus dotted-path command-line overrides.

Configs are nested key/value mappings validated against a per-experiment
schema before any computation; unknown keys are hard errors so typos never
silently fall back to defaults.
"""

from __future__ import annotations

import copy
from typing import Any, Dict, Optional

import yaml

from .errors import ConfigError

__all__ = ["load_config", "apply_overrides", "validate_config", "SCHEMAS"]


# Schema grammar: {key: (type or nested schema, default)}; a default of
# _REQUIRED marks a mandatory key.
_REQUIRED = object()

_SHAPE_SCHEMA = {
    "type": (str, _REQUIRED),          # stadium | rectangle | circle
    "r": (float, 1.0),
    "l": (float, 2.0),
    "a": (float, 2.0),
    "b": (float, 1.0),
    "R": (float, 1.0),
}

_SOLVER_SCHEMA = {
    "basis_factor": (float, 2.5),
    "points_per_wavelength": (float, 10.0),
    "slice_width": (float, 0.2),
    "weyl_tolerance": (float, 2.0),
}

_TRAP_SCHEMA = {
    "type": (str, _REQUIRED),          # gaussian | evanescent | harmonic
    "U": (float, 60.0),
    "w": (float, 8.0),
    "kappa": (float, 1.0),
    "omega": (float, 1.0),
    "x0": (float, 0.0),
    "g": (float, 0.2),
    "m": (float, 1.0),
    "eta": (float, 1e-3),
}

_GRID_SCHEMA = {
    "x_min": (float, -20.0),
    "x_max": (float, 24.0),
    "n": (int, 1024),
}

SCHEMAS: Dict[str, dict] = {
    "eigensolve": {
        "shape": (_SHAPE_SCHEMA, _REQUIRED),
        "parity": (list, [-1, -1]),
        "k_center": (float, 100.0),
        "half_width": (float, 0.35),
        "solver": (_SOLVER_SCHEMA, {}),
        "density_grid_step": (float, 0.02),
    },
    "overlap-scan": {
        "shape": (_SHAPE_SCHEMA, _REQUIRED),
        "parity": (list, [-1, -1]),
        "k_center": (float, 100.0),
        "half_width": (float, 0.25),
        "family": (str, _REQUIRED),    # dilation | stretch | physical
        "strengths": (list, _REQUIRED),
        "solver": (_SOLVER_SCHEMA, {}),
        "overlap_method": (str, "boundary"),
    },
    "level-tracking": {
        "shape": (_SHAPE_SCHEMA, _REQUIRED),
        "parity": (list, [-1, -1]),
        "k_center": (float, 100.0),
        "half_width": (float, 0.25),
        "family": (str, _REQUIRED),
        "strengths": (list, _REQUIRED),
        "solver": (_SOLVER_SCHEMA, {}),
        "overlap_method": (str, "boundary"),
    },
    "echo-trap": {
        "trap": (_TRAP_SCHEMA, _REQUIRED),
        "grid": (_GRID_SCHEMA, {}),
        "n_states": (int, 40),
        "n_rows": (int, 0),            # 0: auto (n_states plus margin)
        "temperature": (float, 60.0),
        "tau_max_periods": (float, 1.6),
        "tau_points": (int, 161),
        "ramsey": (bool, True),
    },
    "echo-billiard": {
        "shape": (_SHAPE_SCHEMA, _REQUIRED),
        "parity": (list, [-1, -1]),
        "k_center": (float, 100.0),
        "half_width": (float, 0.9),
        "displacement": (float, 5e-4),
        "temperature": (float, 1e6),
        "tau_points": (int, 200),
        "solver": (_SOLVER_SCHEMA, {}),
        "overlap_method": (str, "boundary"),
    },
    "dephasing-free": {
        "evanescent": (_TRAP_SCHEMA, _REQUIRED),
        "gaussian": (_TRAP_SCHEMA, _REQUIRED),
        "evanescent_grid": (_GRID_SCHEMA, {}),
        "gaussian_grid": (_GRID_SCHEMA, {}),
        "n_states": (int, 20),
        "tau": (float, 1.0),
    },
}


def load_config(path: str) -> Dict[str, Any]:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path!r} is not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path!r} must be a mapping at top level")
    return data


def _parse_value(text: str):
    """Interpret an override value with YAML scalar rules."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def apply_overrides(config: Dict[str, Any], overrides) -> Dict[str, Any]:
    """Apply repeatable --set path.to.key=value flags."""
    out = copy.deepcopy(config)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form KEY=VALUE")
        path, _, raw = item.partition("=")
        keys = path.strip().split(".")
        node = out
        for key in keys[:-1]:
            nxt = node.setdefault(key, {})
            if not isinstance(nxt, dict):
                raise ConfigError(f"override path {path!r} crosses a scalar at {key!r}")
            node = nxt
        node[keys[-1]] = _parse_value(raw.strip())
    return out


def _validate_node(schema: dict, data: dict, prefix: str) -> dict:
    unknown = set(data) - set(schema)
    if unknown:
        where = prefix or "top level"
        raise ConfigError(f"unknown config key(s) at {where}: {sorted(unknown)}")
    out = {}
    for key, (kind, default) in schema.items():
        label = f"{prefix}.{key}" if prefix else key
        if isinstance(kind, dict):
            sub = data.get(key, default)
            if sub is _REQUIRED:
                raise ConfigError(f"missing required config section {label!r}")
            if not isinstance(sub, dict):
                raise ConfigError(f"config section {label!r} must be a mapping")
            out[key] = _validate_node(kind, sub, label)
            continue
        if key not in data:
            if default is _REQUIRED:
                raise ConfigError(f"missing required config key {label!r}")
            out[key] = copy.deepcopy(default)
            continue
        value = data[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        # YAML 1.1 resolves "1.0e6" (no sign after the exponent) as a string;
        # accept any string that parses as a float rather than surprising the
        # user with a type error.
        if kind is float and isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                pass
        if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
            raise ConfigError(
                f"config key {label!r} must be {kind.__name__}, got {value!r}"
            )
        out[key] = value
    return out


def validate_config(experiment: str, data: Dict[str, Any]) -> Dict[str, Any]:
    """Validated config with defaults filled in; raises ConfigError."""
    if experiment not in SCHEMAS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    return _validate_node(SCHEMAS[experiment], data, "")

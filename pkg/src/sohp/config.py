"""Run configuration: TOML-style ``key = value`` text with optional sections.

Section headers flatten into dotted keys, so::

    [initial]
    preset = "equatorial_wave"

sets ``initial.preset``.  Every subcommand has a fixed schema; unknown keys
and out-of-range values are errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import tomli
import tomli_w

SUBCOMMANDS = ("coeffs", "hyperbolicity", "hydro", "diffusive", "llg", "kinetic", "sweep")


class ConfigError(ValueError):
    """Invalid configuration.  ``line``/``column`` are set for syntax errors."""

    def __init__(self, message, *, key=None, line=None, column=None):
        super().__init__(message)
        self.key = key
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        out = {"error": type(self).__name__, "message": str(self)}
        for name in ("key", "line", "column"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        return out


@dataclass(frozen=True)
class Param:
    default: object
    kind: type
    check: object = None  # callable(value) -> bool
    rule: str = ""
    choices: tuple = ()


def _pos(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _odd_grid(n):
    return n >= 67 and n % 2 == 1


POS = dict(check=_pos, rule="> 0")
NONNEG = dict(check=_nonneg, rule=">= 0")

_COEFF_SOURCE = {
    "source": Param("model", str, choices=("model", "explicit")),
    "d": Param(1.0, float, **POS),
    "alpha": Param(0.0, float),
    "a": Param(0.5, float),
    "lambda": Param(1.0, float, **NONNEG),
    "delta": Param(0.0, float),
    "grid_n": Param(2001, int, _odd_grid, "odd and >= 67"),
}

_HYDRO_INITIAL = {
    "initial.preset": Param("equatorial_wave", str,
                            choices=("uniform", "equatorial_wave", "polar_cap")),
    "initial.rho0": Param(1.0, float, **POS),
    "initial.theta0": Param(1.5707963267948966, float),
    "initial.varphi0": Param(3.141592653589793, float),
    "initial.amp_rho": Param(0.1, float, **NONNEG),
    "initial.amp_theta": Param(0.1, float),
    "initial.amp_varphi": Param(0.1, float),
}

_FIELD = {
    "dim": Param(1, int, lambda n: n in (1, 2), "1 or 2"),
    "n": Param(64, int, lambda n: n >= 4, ">= 4"),
    "length": Param(2 * math.pi, float, **POS),
    "t_final": Param(1.0, float, **NONNEG),
    "out_dt": Param(0.5, float, **POS),
    "dt": Param(0.0, float, _nonneg, ">= 0 (0 selects the stable step)"),
    "cfl": Param(0.2, float, lambda x: 0 < x <= 1, "in (0, 1]"),
    "initial.preset": Param("random_smooth", str, choices=("random_smooth", "spin_wave")),
    "initial.q": Param(1, int),
    "initial.tilt": Param(math.pi / 2, float),
    "initial.modes": Param(3, int, lambda n: n >= 0, ">= 0"),
    "initial.amplitude": Param(1.0, float, **NONNEG),
    "initial.amp_rho": Param(0.0, float, lambda x: 0 <= x < 1, "in [0, 1)"),
}

SCHEMAS = {
    "coeffs": {
        "d": Param(1.0, float, **POS),
        "alpha": Param(0.0, float),
        "grid_n": Param(2001, int, _odd_grid, "odd and >= 67"),
    },
    "hyperbolicity": {
        **_COEFF_SOURCE,
        "n_theta": Param(1001, int, lambda n: n >= 2, ">= 2"),
    },
    "hydro": {
        **_COEFF_SOURCE,
        **_HYDRO_INITIAL,
        "n": Param(200, int, lambda n: n >= 4, ">= 4"),
        "length": Param(1.0, float, **POS),
        "cfl": Param(0.45, float, lambda x: 0 < x <= 1, "in (0, 1]"),
        "t_final": Param(0.2, float, **NONNEG),
        "out_dt": Param(0.1, float, **POS),
        "theta_min": Param(0.1, float, lambda x: 0 < x < 1, "in (0, 1)"),
        "c": Param(1.0, float, **POS),
    },
    "diffusive": {
        **_FIELD,
        "c": Param(1.0, float, **NONNEG),
        "d": Param(1.0, float, **POS),
        "alpha": Param(0.0, float),
        "kappa": Param(0.1, float, **NONNEG),
        "phi_rep": Param(0.0, float, **NONNEG),
        "grid_n": Param(2001, int, _odd_grid, "odd and >= 67"),
    },
    "llg": {
        **_FIELD,
        "source": Param("model", str, choices=("model", "explicit")),
        "d": Param(1.0, float, **POS),
        "alpha": Param(0.0, float),
        "kappa": Param(1.0, float, **NONNEG),
        "damping": Param(1.0, float, **NONNEG),
        "precession": Param(0.0, float),
        "grid_n": Param(2001, int, _odd_grid, "odd and >= 67"),
    },
    "kinetic": {
        "n": Param(10000, int, lambda n: n >= 1, ">= 1"),
        "d": Param(1.0, float, **POS),
        "alpha": Param(0.0, float),
        "dt": Param(0.005, float, **POS),
        "t_final": Param(10.0, float, **NONNEG),
        "out_dt": Param(1.0, float, **POS),
        "burn_in": Param(-1.0, float, rule="< 0 selects 5/d"),
        "mode": Param("fixed_omega", str,
                      choices=("fixed_omega", "self_consistent", "spatial_demo")),
        "initial": Param("uniform", str, choices=("uniform", "polarized", "aligned")),
        "bias": Param(0.5, float, **NONNEG),
        "c": Param(1.0, float, **NONNEG),
        "box": Param(1.0, float, **POS),
        "cells": Param(4, int, lambda n: n >= 1, ">= 1"),
        "dump_velocities": Param(False, bool),
    },
    "sweep": {
        "d_values": Param([0.5, 1.0, 2.0], list),
        "alpha_values": Param([0.0, 1.0, 5.0], list),
        "grid_n": Param(2001, int, _odd_grid, "odd and >= 67"),
        "n_theta": Param(1001, int, lambda n: n >= 2, ">= 2"),
        "workers": Param(1, int, lambda n: n >= 1, ">= 1"),
    },
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    parameters: dict
    output_dir: str = "."
    seed: int | None = None
    defaults: tuple = field(default=(), compare=False)

    def __getitem__(self, key):
        return self.parameters[key]

    def section(self, prefix: str) -> dict:
        p = prefix + "."
        return {k[len(p):]: v for k, v in self.parameters.items() if k.startswith(p)}

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, "parameters": dict(self.parameters),
                "seed": self.seed, "defaults": list(self.defaults)}


def _flatten(table, prefix=""):
    out = {}
    for k, v in table.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _coerce(key, value, param: Param):
    kind = param.kind
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}", key=key)
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"{key} must be finite", key=key)
    elif kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}", key=key)
    elif kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be true or false, got {value!r}", key=key)
    elif kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}", key=key)
    elif kind is list:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{key} must be a non-empty list", key=key)
        try:
            value = [float(x) for x in value]
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a list of numbers", key=key) from None
    if param.choices and value not in param.choices:
        raise ConfigError(f"{key} must be one of {list(param.choices)}, got {value!r}", key=key)
    if param.check is not None and not param.check(value):
        raise ConfigError(f"{key} = {value!r} violates the constraint {key} {param.rule}",
                          key=key)
    return value


def validate(subcommand: str, raw: dict, output_dir: str = ".", seed=None) -> RunConfig:
    if subcommand not in SCHEMAS:
        raise ConfigError(f"unknown subcommand {subcommand!r}; expected one of {SUBCOMMANDS}")
    schema = SCHEMAS[subcommand]
    raw = dict(raw)
    if "seed" in raw:
        file_seed = raw.pop("seed")
        if isinstance(file_seed, bool) or not isinstance(file_seed, int):
            raise ConfigError("seed must be an integer", key="seed")
        seed = file_seed if seed is None else seed
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s) for {subcommand}: {', '.join(unknown)}",
                          key=unknown[0])
    params, defaults = {}, []
    for key, param in schema.items():
        if key in raw:
            params[key] = _coerce(key, raw[key], param)
        else:
            params[key] = param.default
            defaults.append(key)
    return RunConfig(subcommand, params, str(output_dir), seed, tuple(defaults))


def parse_config(text: str, subcommand: str, output_dir: str = ".", seed=None) -> RunConfig:
    """Parse and validate configuration text for ``subcommand``."""
    try:
        table = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}", line=getattr(exc, "lineno", None),
                          column=getattr(exc, "colno", None)) from None
    return validate(subcommand, _flatten(table), output_dir, seed)


def serialize(cfg: RunConfig) -> str:
    """Render a config back to text that ``parse_config`` accepts."""
    nested: dict = {}
    for key, value in cfg.parameters.items():
        node = nested
        *path, leaf = key.split(".")
        for part in path:
            node = node.setdefault(part, {})
        node[leaf] = value
    if cfg.seed is not None:
        nested = {"seed": cfg.seed, **nested}
    # scalars must precede tables in TOML
    flat = {k: v for k, v in nested.items() if not isinstance(v, dict)}
    tables = {k: v for k, v in nested.items() if isinstance(v, dict)}
    return tomli_w.dumps({**flat, **tables})

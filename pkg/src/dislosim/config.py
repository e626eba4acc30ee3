"""Scenario configuration files.

Flat INI-style sections with typed keys; unknown sections or keys are
rejected so that a typo fails the run instead of silently using a default.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .tensors import GeneralElasticity, IsotropicElasticity

SCENARIOS = (
    "field-sample",
    "verify-analytic",
    "curve-glide",
    "loop-shrink",
    "slip-plane",
    "relaxation",
    "classical-compare",
)

# key -> (parser, required, default)
_SCHEMA = {
    "scenario": {
        "name": (str, True, None),
        "b1": (float, False, 1.0),
        "b3": (float, False, 0.0),
        "burgers": ("vec3", False, (1.0, 0.0, 0.0)),
        "radius": (float, False, 0.25),
        "n_nodes": (int, False, 128),
        "mode": (str, False, "front"),
    },
    "geometry": {
        "lengths": ("vec3", False, (1.0, 1.0, 1.0)),
        "resolution": ("ivec3", True, None),
    },
    "material": {
        "lambda": (float, False, 1.0),
        "mu": (float, False, 1.0),
        "stiffness": ("mat6", False, None),
    },
    "mobility": {
        "c": (float, False, 1.0),
        "gamma": (float, False, 1.0),
    },
    "loading": {
        # symmetric components t11 t22 t33 t23 t13 t12
        "mean_stress": ("vec6", False, (0.0,) * 6),
    },
    "run": {
        "dt": (float, False, 1e-3),
        "t_end": (float, False, 0.1),
        "snapshot_every": (int, False, 0),
        "max_steps": (int, False, 0),
        "seed": (int, False, 0),
    },
    "io": {
        "output_dir": (str, False, "out"),
    },
}


def _parse_numbers(raw, n, cast, key):
    parts = raw.replace(",", " ").split()
    if len(parts) != n:
        raise ConfigError(f"key {key!r} needs {n} values, got {len(parts)}")
    try:
        return tuple(cast(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def _parse_value(kind, raw, key):
    try:
        if kind is str:
            return raw.strip()
        if kind is float:
            return float(raw)
        if kind is int:
            return int(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc
    if kind == "vec3":
        return _parse_numbers(raw, 3, float, key)
    if kind == "ivec3":
        return _parse_numbers(raw, 3, int, key)
    if kind == "vec6":
        return _parse_numbers(raw, 6, float, key)
    if kind == "mat6":
        return _parse_numbers(raw, 36, float, key)
    raise AssertionError(kind)


@dataclass
class ScenarioConfig:
    """Validated configuration; plain values only, no live objects."""

    values: dict = field(default_factory=dict)
    path: str = ""

    def __getitem__(self, key):
        return self.values[key]

    @property
    def scenario(self):
        return self.values["scenario.name"]

    def elasticity(self):
        if self.values.get("material.stiffness") is not None:
            d = np.array(self.values["material.stiffness"]).reshape(6, 6)
            return GeneralElasticity(d)
        return IsotropicElasticity(self.values["material.lambda"],
                                   self.values["material.mu"])

    def mean_stress(self):
        t11, t22, t33, t23, t13, t12 = self.values["loading.mean_stress"]
        return np.array([[t11, t12, t13],
                         [t12, t22, t23],
                         [t13, t23, t33]])


def load_config(path):
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path!r}: {exc}") from exc

    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}] in {path!r}")
        schema = _SCHEMA[section]
        for key, raw in cp[section].items():
            if key not in schema:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}] of {path!r}")
            kind = schema[key][0]
            values[f"{section}.{key}"] = _parse_value(kind, raw, key)

    for section, schema in _SCHEMA.items():
        for key, (kind, required, default) in schema.items():
            full = f"{section}.{key}"
            if full in values:
                continue
            if required:
                raise ConfigError(f"missing required key {full!r} in {path!r}")
            values[full] = default

    cfg = ScenarioConfig(values=values, path=str(path))
    _validate(cfg)
    return cfg


def _validate(cfg):
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {cfg.scenario!r}; expected one of "
            + ", ".join(SCENARIOS))
    res = cfg["geometry.resolution"]
    for n in res:
        if n < 8 or n % 2:
            raise ConfigError(
                f"grid resolution {res} rejected: the spectral solver "
                "needs even n >= 8 on every axis")
    for axis, L in enumerate(cfg["geometry.lengths"]):
        if L <= 0.0:
            raise ConfigError(f"cell length along axis {axis} must be positive")
    if cfg["mobility.c"] <= 0.0:
        raise ConfigError("mobility coefficient c must be positive")
    if cfg["mobility.gamma"] < 1.0:
        raise ConfigError("mobility exponent gamma must be >= 1")
    if cfg["run.dt"] <= 0.0 or cfg["run.t_end"] <= 0.0:
        raise ConfigError("run.dt and run.t_end must be positive")
    if cfg["scenario.radius"] <= 0.0:
        raise ConfigError("scenario.radius must be positive")
    if cfg["scenario.n_nodes"] < 4:
        raise ConfigError("scenario.n_nodes must be at least 4")
    if cfg["scenario.mode"] not in ("front", "loop"):
        raise ConfigError("scenario.mode must be 'front' or 'loop'")
    b = np.array(cfg["scenario.burgers"], float)
    if np.linalg.norm(b) == 0.0:
        raise ConfigError("scenario.burgers must be nonzero")
    try:
        cfg.elasticity()
    except Exception as exc:
        raise ConfigError(f"invalid material section: {exc}") from exc

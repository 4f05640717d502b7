"""Scenario configuration files.

A config is one JSON object with optional sections ``plant``,
``controller``, ``scenario`` and (for sweeps) ``grid``. Unknown keys are
rejected anywhere in the document so a typo never silently falls back to a
default.

Example::

    {
      "plant": {"use_paper_gain": false},
      "controller": {"type": "2dof", "rho": 3, "lambda": 10, "k": 2},
      "scenario": {
        "reference": {"kind": "step", "amplitude": 10},
        "duration": 5, "Ts": 0.001, "sigma_d": 0, "sigma_n": 0, "seed": 42
      }
    }
"""
from __future__ import annotations

import json
import math
import numbers
from dataclasses import replace

from .errors import ConfigError, InvalidInputError
from .lti import TransferFunction
from .poly import Polynomial
from .sea_model import SeaParams
from .simulation import ExplicitController, ReferenceSpec, ScenarioConfig, TwoDofSpec
from .synthesis import PidGains

TOP_KEYS = {"plant", "controller", "scenario", "grid"}
SEA_KEYS = {"motor_num", "motor_den", "Kg", "Ks", "r", "use_paper_gain"}
TF_KEYS = {"num", "den"}
TWO_DOF_KEYS = {"type", "rho", "lambda", "k"}
PID_KEYS = {"type", "Kp", "Ki", "Kd", "N"}
EXPLICIT_KEYS = {
    "type", "c1", "c2", "d_rho", "d_lambda_k", "p", "q", "rho", "lambda", "k", "pid", "diagnostics",
}
SCENARIO_KEYS = {
    "reference", "duration", "Ts", "sigma_d", "sigma_n", "d_offset", "seed",
    "plant_discretization", "controller_discretization",
}
REFERENCE_KEYS = {"kind", "amplitude", "frequency", "f0", "f1", "T"}
GRID_2DOF = ("rho", "lambda", "k")
GRID_PID = ("Kp", "Ki", "Kd", "N")


def _check_keys(section: dict, allowed: set, where: str):
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _number(section, key, where, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing required key {where}.{key}")
        return default
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, numbers.Real) or not math.isfinite(val):
        raise ConfigError(f"{where}.{key} must be a finite number")
    return float(val)


def _coeffs(val, where):
    if not isinstance(val, list) or not val:
        raise ConfigError(f"{where} must be a non-empty list of numbers")
    for c in val:
        if isinstance(c, bool) or not isinstance(c, numbers.Real):
            raise ConfigError(f"{where} must contain only numbers")
    return [float(c) for c in val]


def _tf(section, where) -> TransferFunction:
    _check_keys(section, TF_KEYS, where)
    if not TF_KEYS <= set(section):
        raise ConfigError(f"{where} needs both 'num' and 'den'")
    return TransferFunction(
        Polynomial(_coeffs(section["num"], f"{where}.num")),
        Polynomial(_coeffs(section["den"], f"{where}.den")),
    )


def parse_plant(section: dict | None):
    if section is None:
        return SeaParams()
    if not isinstance(section, dict):
        raise ConfigError("plant must be a JSON object")
    if set(section) & TF_KEYS:
        return _tf(section, "plant")
    _check_keys(section, SEA_KEYS, "plant")
    defaults = SeaParams()
    kwargs = {}
    for key in ("Kg", "Ks", "r"):
        kwargs[key] = _number(section, key, "plant", getattr(defaults, key))
    for key in ("motor_num", "motor_den"):
        if key in section:
            kwargs[key] = tuple(_coeffs(section[key], f"plant.{key}"))
    if "use_paper_gain" in section:
        if not isinstance(section["use_paper_gain"], bool):
            raise ConfigError("plant.use_paper_gain must be true or false")
        kwargs["use_paper_gain"] = section["use_paper_gain"]
    return SeaParams(**kwargs)


def parse_controller(section: dict | None):
    if section is None:
        raise ConfigError("missing 'controller' section")
    if not isinstance(section, dict) or "type" not in section:
        raise ConfigError("controller needs a 'type' of '2dof', 'pid' or 'explicit'")
    kind = section["type"]
    if kind == "2dof":
        _check_keys(section, TWO_DOF_KEYS, "controller")
        return TwoDofSpec(
            _number(section, "rho", "controller"),
            _number(section, "lambda", "controller"),
            _number(section, "k", "controller"),
        )
    if kind == "pid":
        _check_keys(section, PID_KEYS, "controller")
        return PidGains(
            Kp=_number(section, "Kp", "controller"),
            Ki=_number(section, "Ki", "controller", 0.0),
            Kd=_number(section, "Kd", "controller", 0.0),
            N=_number(section, "N", "controller", 100.0),
        )
    if kind == "explicit":
        _check_keys(section, EXPLICIT_KEYS, "controller")
        if "c1" not in section or "c2" not in section:
            raise ConfigError("explicit controller needs 'c1' and 'c2'")
        return ExplicitController(
            _tf(section["c1"], "controller.c1"), _tf(section["c2"], "controller.c2")
        )
    raise ConfigError(f"unknown controller type {kind!r}")


def parse_reference(section: dict | None) -> ReferenceSpec:
    if section is None:
        return ReferenceSpec()
    _check_keys(section, REFERENCE_KEYS, "scenario.reference")
    kw = {}
    if "kind" in section:
        if not isinstance(section["kind"], str):
            raise ConfigError("scenario.reference.kind must be a string")
        kw["kind"] = section["kind"]
    defaults = ReferenceSpec()
    for key in ("amplitude", "frequency", "f0", "f1", "T"):
        kw[key] = _number(section, key, "scenario.reference", getattr(defaults, key))
    return ReferenceSpec(**kw)


def parse_scenario(data: dict, seed_override: int | None = None) -> ScenarioConfig:
    """Build a ScenarioConfig from a parsed config document."""
    _check_keys(data, TOP_KEYS, "config")
    scen = data.get("scenario", {})
    _check_keys(scen, SCENARIO_KEYS, "scenario")
    defaults = ScenarioConfig()
    kw = {
        "plant": parse_plant(data.get("plant")),
        "controller": parse_controller(data.get("controller")),
        "reference": parse_reference(scen.get("reference")),
    }
    for key in ("duration", "Ts", "sigma_d", "sigma_n", "d_offset"):
        kw[key] = _number(scen, key, "scenario", getattr(defaults, key))
    if "seed" in scen:
        seed = scen["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError("scenario.seed must be an integer")
        kw["seed"] = seed
    for key in ("plant_discretization", "controller_discretization"):
        if key in scen:
            kw[key] = scen[key]
    if seed_override is not None:
        kw["seed"] = seed_override
    try:
        return ScenarioConfig(**kw)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc


def parse_grid(data: dict, base: ScenarioConfig) -> tuple[list[str], list[tuple]]:
    """Expand the ``grid`` section into ``(names, points)`` in row-major order.

    The first listed parameter varies slowest. Parameters not in the grid
    keep the base controller's value.
    """
    grid = data.get("grid")
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("sweep needs a non-empty 'grid' section")
    if isinstance(base.controller, TwoDofSpec):
        names = GRID_2DOF
    elif isinstance(base.controller, PidGains):
        names = GRID_PID
    else:
        raise ConfigError("sweep needs a '2dof' or 'pid' base controller")
    _check_keys(grid, set(names), "grid")
    axes = []
    for name in names:
        if name in grid:
            vals = grid[name]
            if not isinstance(vals, list) or not vals:
                raise ConfigError(f"grid.{name} must be a non-empty list")
            axes.append([_number({name: v}, name, "grid") for v in vals])
        else:
            axes.append([_base_value(base.controller, name)])
    points = [()]
    for axis in axes:
        points = [pt + (v,) for pt in points for v in axis]
    return list(names), points


def _base_value(controller, name):
    if isinstance(controller, TwoDofSpec):
        return {"rho": controller.rho, "lambda": controller.lam, "k": controller.k}[name]
    return getattr(controller, name)


def with_point(cfg: ScenarioConfig, names, point) -> ScenarioConfig:
    values = dict(zip(names, point))
    if isinstance(cfg.controller, TwoDofSpec):
        ctrl = TwoDofSpec(values["rho"], values["lambda"], values["k"])
    else:
        ctrl = PidGains(**values)
    return replace(cfg, controller=ctrl)


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data

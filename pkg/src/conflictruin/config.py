"""Run configuration: one JSON document per run.

Layout::

    {
      "command": "sweep",
      "parameters": {"quantity": "q_simple", "m_max": 50},
      "axes": {"m": [1, 2, 3], "n": [15], "s": [0.5, 1, 2, 4]},
      "output": {"format": "csv", "path": null}
    }

Unknown keys anywhere are rejected so that a typo such as ``"gamm"`` cannot
silently fall back to a default.
"""

import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ._errors import DomainError
from .analysis import AXES, QUANTITIES
from .battle import GAMMA_CONVENTIONS

__all__ = ["COMMANDS", "PARAMETERS", "ConfigError", "RunConfig", "load_config", "validate_parameters"]

COMMANDS = (
    "battle-p", "winprob", "simulate", "decide", "equilibrium",
    "classify", "verify-prop1", "critical-s", "optimal-m", "sweep",
)


class ConfigError(DomainError):
    """The configuration file is missing, malformed, or names unknown keys."""


def _positive(name, v):
    if isinstance(v, bool) or not isinstance(v, numbers.Real) or not math.isfinite(v) or v <= 0:
        raise DomainError(f"{name} must be > 0 (got {v!r})")


def _finite(name, v):
    if isinstance(v, bool) or not isinstance(v, numbers.Real) or not math.isfinite(v):
        raise DomainError(f"{name} must be a finite number (got {v!r})")


def _positive_int(name, v):
    if isinstance(v, bool) or not isinstance(v, numbers.Integral) or v < 1:
        raise DomainError(f"{name} must be an integer >= 1 (got {v!r})")


def _unit(name, v):
    _finite(name, v)
    if not 0 < v < 1:
        raise DomainError(f"{name} must lie in (0, 1) (got {v!r})")


def _seed(name, v):
    if isinstance(v, bool) or not isinstance(v, numbers.Integral) or not 0 <= v < 2**64:
        raise DomainError(f"{name} must be an unsigned 64-bit integer (got {v!r})")


def _flag(name, v):
    if not isinstance(v, bool):
        raise DomainError(f"{name} must be true or false (got {v!r})")


def _convention(name, v):
    if v not in GAMMA_CONVENTIONS:
        raise DomainError(f"{name} must be one of {list(GAMMA_CONVENTIONS)} (got {v!r})")


def _quantity(name, v):
    if v not in QUANTITIES:
        raise DomainError(f"{name} must be one of {sorted(QUANTITIES)} (got {v!r})")


def _members(name, v):
    if not isinstance(v, list):
        raise DomainError(f"{name} must be a list of {{r, b, c, s_hat}} objects")
    for k, member in enumerate(v):
        if not isinstance(member, dict):
            raise DomainError(f"{name}[{k}] must be an object with keys r, b, c, s_hat")
        unknown = set(member) - {"r", "b", "c", "s_hat"}
        if unknown:
            raise ConfigError(f"unknown key {sorted(unknown)[0]!r} in {name}[{k}]")
        for key in ("r", "b", "c", "s_hat"):
            if key not in member:
                raise DomainError(f"{name}[{k}] is missing {key!r}")
        _positive(f"{name}[{k}].r", member["r"])
        _finite(f"{name}[{k}].b", member["b"])
        _positive(f"{name}[{k}].c", member["c"])
        _positive(f"{name}[{k}].s_hat", member["s_hat"])


#: parameter name -> domain check
PARAMETERS = {
    "s": _positive, "s_hat": _positive, "m": _positive_int, "n": _positive_int,
    "m0": _positive_int, "m1": _positive_int, "R": _positive, "gamma": _finite,
    "r": _positive, "b": _finite, "c": _positive, "p": _unit,
    "trials": _positive_int, "seed": _seed, "workers": _positive_int,
    "m_max": _positive_int, "s_lo": _positive, "s_hi": _positive, "tolerance": _positive,
    "general": _flag, "gamma_convention": _convention, "quantity": _quantity,
    "members": _members,
    "r_myopic": _positive, "bc_naive": _finite, "s_defeatist": _positive, "s_complacent": _positive,
}

_TOP_LEVEL = {"command", "parameters", "axes", "output"}
_OUTPUT_KEYS = {"format", "path"}


def validate_parameters(parameters):
    for key, value in parameters.items():
        if key not in PARAMETERS:
            raise ConfigError(f"unknown parameter {key!r}")
        PARAMETERS[key](key, value)


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    axes: dict = field(default_factory=dict)
    output_format: str = "csv"
    output_path: Optional[str] = None

    @property
    def seed(self):
        return self.parameters.get("seed")

    def to_dict(self):
        return {
            "command": self.command,
            "parameters": dict(self.parameters),
            "axes": {k: list(v) for k, v in self.axes.items()},
            "output": {"format": self.output_format, "path": self.output_path},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(doc) - _TOP_LEVEL
        if unknown:
            raise ConfigError(f"unknown key {sorted(unknown)[0]!r} at top level")
        command = doc.get("command")
        if command not in COMMANDS:
            raise ConfigError(f"command must be one of {list(COMMANDS)} (got {command!r})")
        parameters = doc.get("parameters", {}) or {}
        if not isinstance(parameters, dict):
            raise ConfigError("parameters must be an object")
        validate_parameters(parameters)
        axes = doc.get("axes", {}) or {}
        if not isinstance(axes, dict):
            raise ConfigError("axes must be an object")
        for name, values in axes.items():
            if name not in AXES:
                raise ConfigError(f"unknown axis {name!r}")
            if not isinstance(values, list) or not values:
                raise ConfigError(f"axis {name!r} must be a non-empty list")
            for v in values:
                PARAMETERS["b" if name == "b_c" else name](name, v)
        output = doc.get("output", {}) or {}
        if not isinstance(output, dict):
            raise ConfigError("output must be an object")
        unknown = set(output) - _OUTPUT_KEYS
        if unknown:
            raise ConfigError(f"unknown key {sorted(unknown)[0]!r} in output")
        fmt = output.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json (got {fmt!r})")
        path = output.get("path")
        if path is not None and not isinstance(path, str):
            raise ConfigError("output path must be a string or null")
        return cls(command, dict(parameters), {k: list(v) for k, v in axes.items()}, fmt, path)


def load_config(path):
    """Read and validate a run configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return RunConfig.from_dict(doc)

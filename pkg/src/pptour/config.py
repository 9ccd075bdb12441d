"""Run configuration: a YAML tree describing one CLI run.

Schema (all keys optional except ``command``)::

    command: simulate | evaluate | trace | optimize | diagnose | plot
    output: out/                  # artifact directory
    seed: 0                       # master seed
    data:                         # either a CSV source ...
      csv: data.csv
      drop: [m2]
      scale: minmax               # none | standardize | minmax | sphere:k
    # ... or a simulated family
    #   simulate: {family: sine, n: 1000, p: 6, noise_params: {}}
    indexes:                      # first entry is the primary index
      - splines2d
      - {name: skinny, params: {bin_cap: 40}}
    optimizer: {method: geodesic, max_tries: 25}     # guided tour, or
    #   {scout: {...}, refine: {...}} for scout_then_refine
    diagnostics: {...}            # command-specific, see cli.py
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .errors import ConfigError
from .indexes import descriptor

COMMANDS = ("simulate", "evaluate", "trace", "optimize", "diagnose", "plot")


@dataclass
class RunConfig:
    command: str
    output: str = "out"
    seed: int = 0
    data: dict = field(default_factory=dict)
    indexes: list = field(default_factory=list)
    optimizer: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        for name in ("data", "optimizer", "diagnostics"):
            if not isinstance(getattr(self, name), dict):
                raise ConfigError(f"{name} must be a mapping")
        if not isinstance(self.indexes, list):
            raise ConfigError("indexes must be a list")
        for ix in self.indexes:
            descriptor(ix)  # raises UnknownIndex / InvalidParameter
        if self.data and ("csv" in self.data) == ("simulate" in self.data):
            raise ConfigError("data needs exactly one of 'csv' or 'simulate'")

    def to_dict(self) -> dict:
        return {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a mapping")
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config key(s) {sorted(extra)}")
        if "command" not in d:
            raise ConfigError("config needs a 'command'")
        return cls(**copy.deepcopy(d))

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            d = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}") from None
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "RunConfig":
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"no such config file: {p}")
        return cls.loads(p.read_text(encoding="utf-8"))

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

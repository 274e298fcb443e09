"""Run configuration: a sectioned key = value file with typed, documented defaults.

Example::

    [data]
    synth = reference        # or give load/weather/holidays paths
    cutoff = 2018-12-30      # last training day

    [run]
    models = SARIMAX, ANN, SARIMAX-ANN
    seed = 7

    [sarimax]
    order = 4,1,1,2,0,0,7    # empty: AIC search over the p/d/q/P/D/Q/S lists

    [mlp]
    hidden_sizes = 16
    epochs = 200

    [grid.svr]
    C = 0.5, 1, 2

Unknown sections and keys are errors.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .evaluation import (CRITERIA, DEFAULT_SARIMAX_GRID, MODEL_NAMES, BenchmarkSettings,
                         GridSpec)
from .models import KINDS
from .neural.lstm import LstmConfig
from .neural.mlp import MlpConfig
from .sarimax import SarimaxOrder
from .series import to_day
from .svr import SvrConfig

OUT_ENV = "PEAKLOAD_OUT"
DEFAULT_OUT = "peakload-out"


class ConfigError(ValueError):
    pass


def _int_list(text: str) -> tuple:
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _names(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


# section -> key -> (parser, default)
SCHEMA = {
    "data": {
        "load": (str, ""),
        "weather": (str, ""),
        "holidays": (str, ""),
        "synth": (str, ""),
        "synth_seed": (int, 42),
        "cutoff": (str, ""),
    },
    "run": {
        "models": (_names, MODEL_NAMES),
        "seed": (int, 0),
        "output": (str, ""),
        "criterion": (str, "aic"),
        "folds": (int, 5),
        "cv_criterion": (str, "rmse"),
        "workers": (int, 1),
        "timing": (_bool, False),
    },
    "sarimax": {
        "order": (str, ""),
        **{k: (_int_list, v) for k, v in DEFAULT_SARIMAX_GRID.items()},
    },
}

_MODEL_CONFIGS = {"mlp": MlpConfig, "svr": SvrConfig, "lstm": LstmConfig}


def _field_parser(f: dataclasses.Field):
    name, typ = f.name, str(f.type)
    if name == "hidden_sizes":
        return lambda t: tuple(int(x) for x in t.replace(",", "-").split("-") if x.strip())
    if name == "kernel":
        return str
    if name == "clip" and "None" in typ:
        return lambda t: None if t.strip().lower() in ("", "none") else float(t)
    if typ.startswith("int"):
        return int
    return float


def model_keys(kind: str) -> dict:
    keys = {f.name: _field_parser(f) for f in dataclasses.fields(_MODEL_CONFIGS[kind])}
    if kind == "svr":
        keys["lookback"] = int
    return keys


def _grid_values(parser, text: str) -> tuple:
    return tuple(parser(v.strip()) for v in text.split(",") if v.strip())


@dataclass
class RunConfig:
    load: str = ""
    weather: str = ""
    holidays: str = ""
    synth: str = ""
    synth_seed: int = 42
    cutoff: str = ""
    models: tuple = MODEL_NAMES
    seed: int = 0
    output: str = ""
    criterion: str = "aic"
    folds: int = 5
    cv_criterion: str = "rmse"
    workers: int = 1
    timing: bool = False
    order: str = ""
    sarimax_grid: dict = field(default_factory=lambda: dict(DEFAULT_SARIMAX_GRID))
    params: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        has_paths = bool(self.load or self.weather)
        if has_paths and self.synth:
            raise ConfigError("give either data paths or a synth dataset, not both")
        if has_paths and not (self.load and self.weather):
            raise ConfigError("both load and weather paths are required")
        if not has_paths and not self.synth:
            self.synth = "reference"
        if self.synth and self.synth != "reference":
            raise ConfigError(f"unknown synth dataset {self.synth!r}; only 'reference' exists")
        if not self.models:
            raise ConfigError("model roster is empty")
        bad = [m for m in self.models if m not in MODEL_NAMES]
        if bad:
            raise ConfigError(f"unknown model(s) {', '.join(bad)}; choose from "
                              f"{', '.join(MODEL_NAMES)}")
        if self.criterion not in ("aic", "bic"):
            raise ConfigError("criterion must be aic or bic")
        if self.cv_criterion not in CRITERIA:
            raise ConfigError(f"cv_criterion must be one of {', '.join(CRITERIA)}")
        if self.cutoff:
            to_day(self.cutoff)
        if self.order:
            SarimaxOrder.parse(self.order)
        return self

    def output_dir(self) -> Path:
        return Path(self.output or os.environ.get(OUT_ENV) or DEFAULT_OUT)

    def linear_spec(self):
        return SarimaxOrder.parse(self.order) if self.order else dict(self.sarimax_grid)

    def settings(self) -> BenchmarkSettings:
        return BenchmarkSettings(
            linear=self.linear_spec(), criterion=self.criterion,
            params={k: dict(v) for k, v in self.params.items()},
            grids={k: GridSpec(v) for k, v in self.grids.items()},
            folds=self.folds, cv_criterion=self.cv_criterion, seed=self.seed,
            workers=self.workers, timing=self.timing)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    cfg = RunConfig()
    for section in cp.sections():
        items = dict(cp.items(section))
        try:
            _apply_section(cfg, section, items)
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"{source}: [{section}] {exc}") from None
    return cfg.validate()


def _apply_section(cfg: RunConfig, section: str, items: Mapping) -> None:
    if section in SCHEMA:
        schema = SCHEMA[section]
        for key, text in items.items():
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} in [{section}]; "
                                  f"expected one of {', '.join(schema)}")
            value = schema[key][0](text)
            if section == "sarimax" and key != "order":
                cfg.sarimax_grid[key] = value
            else:
                setattr(cfg, key, value)
        return
    kind = section[5:] if section.startswith("grid.") else section
    if kind not in KINDS:
        raise ConfigError(f"unknown section [{section}]")
    keys = model_keys(kind)
    parsed = {}
    for key, text in items.items():
        if key not in keys:
            raise ConfigError(f"unknown key {key!r} in [{section}]; "
                              f"expected one of {', '.join(keys)}")
        if section.startswith("grid."):
            parsed[key] = _grid_values(keys[key], text)
        else:
            parsed[key] = keys[key](text)
    (cfg.grids if section.startswith("grid.") else cfg.params)[kind] = parsed


def read_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), str(path))


def default_config_text() -> str:
    """Every key with its default value, as a commented template."""
    lines = []
    for section, schema in SCHEMA.items():
        lines.append(f"[{section}]")
        for key, (_, default) in schema.items():
            if isinstance(default, tuple):
                default = ", ".join(str(v) for v in default)
            elif isinstance(default, bool):
                default = str(default).lower()
            lines.append(f"{key} = {default}")
        lines.append("")
    for kind, cls in _MODEL_CONFIGS.items():
        lines.append(f"[{kind}]")
        for f in dataclasses.fields(cls):
            value = getattr(cls(), f.name)
            if isinstance(value, tuple):
                value = "-".join(str(v) for v in value)
            lines.append(f"{f.name} = {'none' if value is None else value}")
        if kind == "svr":
            lines.append("lookback = 7")
        lines.append("")
    return "\n".join(lines)

"""
Experiment config files - TOML, one table per run.

    [ode]
    mode = "amr-collocation"
    p = 7
    tol1 = 0.1

    [ko1d-tight]
    experiment = "ko1d"
    tol1 = 1e-5

A table name is the experiment unless the table sets ``experiment`` itself;
in that case the table name becomes the default label. Keys are the fields of
ExperimentConfig; unknown keys are rejected.

Usage:
    from tools.config_file import load_experiment_configs, dump_config

    configs = load_experiment_configs("runs.toml", overrides={"p": 9})
    print(dump_config(configs[0].resolved()))
"""

import json
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from tools.errors import ConfigValidationError
from tools.structured_outputs import PROBLEM_SEPARATOR, Experiment, ExperimentConfig

EXPERIMENT_NAMES = {e.value for e in Experiment}


def _offending_keys(error: ValidationError) -> list[str]:
    keys: list[str] = []
    for item in error.errors():
        if item["loc"]:
            key = str(item["loc"][0])
            keys.append(key)
            continue
        # cross-field problems arrive as "key: message; key: message"
        message = str(item.get("ctx", {}).get("error", item["msg"]))
        for part in message.split(PROBLEM_SEPARATOR):
            if ": " in part:
                keys.append(part.split(": ", 1)[0].removeprefix("Value error, "))
    return list(dict.fromkeys(keys))


def build_config(values: dict[str, Any], overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Validate one table (plus non-None overrides) into an ExperimentConfig."""
    merged = dict(values)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as exc:
        keys = _offending_keys(exc)
        details = "; ".join(f"{'.'.join(str(x) for x in e['loc']) or 'config'}: {e['msg']}" for e in exc.errors())
        raise ConfigValidationError(f"invalid configuration ({', '.join(keys)}): {details}", keys) from None


def parse_sections(data: dict[str, Any]) -> list[dict[str, Any]]:
    """Turn top-level TOML tables into config dictionaries."""
    sections = []
    bad = [name for name, table in data.items() if not isinstance(table, dict)]
    if bad:
        raise ConfigValidationError(f"top-level keys must be tables, got {bad}", bad)
    for name, table in data.items():
        values = dict(table)
        if "experiment" not in values:
            if name not in EXPERIMENT_NAMES:
                raise ConfigValidationError(
                    f"table [{name}] is not an experiment name and sets no 'experiment'", [name]
                )
            values["experiment"] = name
        elif name not in EXPERIMENT_NAMES:
            values.setdefault("label", name)
        sections.append(values)
    return sections


def load_experiment_configs(
    path: str | Path,
    experiment: str | None = None,
    overrides: dict[str, Any] | None = None,
) -> list[ExperimentConfig]:
    """Read a TOML file; optionally keep only tables of one experiment."""
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigValidationError(f"{path}: {exc}", ["file"]) from None
    except OSError as exc:
        raise ConfigValidationError(f"cannot read {path}: {exc}", ["config"]) from None

    configs = []
    problems: list[str] = []
    messages: list[str] = []
    for values in parse_sections(data):
        if experiment is not None and values["experiment"] != experiment:
            continue
        try:
            configs.append(build_config(values, overrides))
        except ConfigValidationError as exc:
            problems.extend(exc.keys)
            messages.append(str(exc))
    if messages:
        raise ConfigValidationError("\n".join(messages), list(dict.fromkeys(problems)))
    if not configs:
        raise ConfigValidationError(f"no table for experiment '{experiment}' in {path}", ["experiment"])
    return configs


# =============================================================================
# DUMP
# =============================================================================
def _toml_value(value: Any) -> str:
    if isinstance(value, Enum):
        value = value.value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot write {type(value).__name__} to TOML")


def dump_config(config: ExperimentConfig, table: str | None = None) -> str:
    """Flat TOML text for one config; None fields are omitted."""
    name = table or config.label or config.experiment.value
    lines = [f"[{json.dumps(name) if not name.replace('-', '').replace('_', '').isalnum() else name}]"]
    for key, value in config.model_dump().items():
        if value is None:
            continue
        lines.append(f"{key} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"


def write_config(config: ExperimentConfig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_config(config), encoding="utf-8")
    return path

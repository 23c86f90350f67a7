"""Experiment configuration: TOML or JSON in, validated dataclasses out."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .drl.ddqn import DdqnConfig
from .sim.student import PopulationConfig


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is the dotted path of the offending key."""

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)


class UnknownField(ConfigError):
    pass


@dataclass(frozen=True)
class Population:
    history: int = 721
    drl_corpus: int = 103
    trial: int = 113


@dataclass(frozen=True)
class Scoring:
    fast_percentile: float = 10.0
    slow_percentile: float = 90.0


@dataclass(frozen=True)
class Reporting:
    bootstrap_iterations: int = 2000


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int = 0
    bank: Optional[Path] = None
    population: Population = field(default_factory=Population)
    student: PopulationConfig = field(default_factory=PopulationConfig)
    scoring: Scoring = field(default_factory=Scoring)
    ddqn: DdqnConfig = field(default_factory=DdqnConfig)
    report: Reporting = field(default_factory=Reporting)

    def to_dict(self) -> dict:
        return _to_plain(self)

    def hash(self) -> str:
        """Digest of every setting that influences results."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return dataclasses.replace(self, master_seed=int(seed), ddqn=dataclasses.replace(self.ddqn, seed=int(seed)))


def camel(name: str) -> str:
    head, *rest = name.split("_")
    return head + "".join(p[:1].upper() + p[1:] for p in rest)


def snake(name: str) -> str:
    return re.sub(r"(?<!^)([A-Z])", r"_\1", name).lower()


def _to_plain(obj) -> Any:
    if dataclasses.is_dataclass(obj):
        return {camel(f.name): _to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, (tuple, list)):
        return [_to_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    return obj


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a table")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        name = snake(key)
        where = f"{path}.{key}" if path else key
        if name not in fields:
            raise UnknownField(where, "unknown field")
        default = getattr(cls(), name)
        if isinstance(default, tuple):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(where, "expected a list")
            value = tuple(value)
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(where, "expected true or false")
        elif isinstance(default, int) and not isinstance(default, bool):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(where, "expected an integer")
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(where, "expected a number")
            value = float(value)
        elif isinstance(default, dict):
            if not isinstance(value, dict):
                raise ConfigError(where, "expected a table")
            value = {**default, **value}
        kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(path or "config", str(e)) from None


def config_from_dict(data: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    data = dict(data)
    allowed = {camel(f.name) for f in dataclasses.fields(ExperimentConfig)}
    for key in data:
        if key not in allowed:
            raise UnknownField(key, "unknown field")
    seed = data.get("masterSeed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("masterSeed", "expected a non-negative integer")
    bank = data.get("bank")
    if bank is not None:
        bank = Path(bank)
        if not bank.is_absolute():
            bank = (base_dir / bank).resolve()
        if not bank.is_dir():
            raise ConfigError("bank", f"no problem bank directory at {bank}")
    population = _build(Population, data.get("population", {}), "population")
    for name in ("history", "drlCorpus", "trial"):
        if getattr(population, snake(name)) < 1:
            raise ConfigError(f"population.{name}", "must be at least 1")
    if population.trial < 3:
        raise ConfigError("population.trial", "the three-condition trial needs at least 3 students")
    scoring = _build(Scoring, data.get("scoring", {}), "scoring")
    if not 0 <= scoring.fast_percentile < scoring.slow_percentile <= 100:
        raise ConfigError("scoring", "need 0 <= fastPercentile < slowPercentile <= 100")
    ddqn_data = dict(data.get("ddqn", {}))
    ddqn_data.setdefault("seed", seed)
    report = _build(Reporting, data.get("report", {}), "report")
    if report.bootstrap_iterations < 0:
        raise ConfigError("report.bootstrapIterations", "must be non-negative")
    return ExperimentConfig(
        seed,
        bank,
        population,
        _build(PopulationConfig, data.get("student", {}), "student"),
        scoring,
        _build(DdqnConfig, ddqn_data, "ddqn"),
        report,
    )


def load_config(path: Path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("path", f"no config file at {path}")
    text = path.read_text()
    try:
        data = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as e:
        raise ConfigError("syntax", str(e)) from None
    return config_from_dict(data, path.parent)


def write_resolved(config: ExperimentConfig, path: Path) -> None:
    """Provenance echo; ``load_config`` reads it back to an equal config."""
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")

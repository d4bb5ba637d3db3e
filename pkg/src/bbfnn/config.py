"""Experiment configuration files (JSON) and their strict validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from .core import InvalidParameter
from .data import Dataset, get_target, load_csv, sample_interleaved, sample_uniform
from .evolution import GaConfig, ParamBounds
from .gradient import GradientConfig
from .hierarchy import RunConfig


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted location of the bad field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class DatasetSpec:
    builtin: Optional[str] = "g2"
    range: tuple[float, float] = (-1.0, 1.0)
    n_train: int = 201
    n_test: int = 126
    train_csv: Optional[str] = None
    test_csv: Optional[str] = None

    def load(self, base_dir: Path = Path(".")) -> tuple[Dataset, Optional[Dataset]]:
        if self.train_csv is not None:
            train = load_csv(base_dir / self.train_csv)
            test = load_csv(base_dir / self.test_csv) if self.test_csv else None
            return train, test
        fn = get_target(self.builtin)
        lo, hi = self.range
        train = sample_uniform(fn, lo, hi, self.n_train, label=f"{self.builtin}-train")
        test = (sample_interleaved(fn, lo, hi, self.n_test, label=f"{self.builtin}-test")
                if self.n_test else None)
        return train, test


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    run: RunConfig = field(default_factory=RunConfig)
    output_dir: str = "out"
    base_dir: Path = Path(".")

    @property
    def seed(self) -> int:
        return self.run.ga.seed

    def with_seed(self, seed: int) -> "ExperimentConfig":
        try:
            return replace(self, run=self.run.with_seed(seed))
        except InvalidParameter as exc:
            raise ConfigError("seed", exc.message) from None

    def load_data(self) -> tuple[Dataset, Optional[Dataset]]:
        return self.dataset.load(self.base_dir)


def _take(section: dict, allowed: set[str], path: str) -> dict:
    if not isinstance(section, dict):
        raise ConfigError(path or "<root>", f"expected an object, got {type(section).__name__}")
    unknown = sorted(set(section) - allowed)
    if unknown:
        where = f"{path}.{unknown[0]}" if path else unknown[0]
        raise ConfigError(where, "unknown key")
    return section


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return value


def _pair(value: Any, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(path, f"expected [lo, hi], got {value!r}")
    return (_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))


def _build(cls, kwargs: dict, path: str):
    try:
        return cls(**kwargs)
    except InvalidParameter as exc:
        raise ConfigError(f"{path}.{exc.field}" if path else exc.field, exc.message) from None


_GA_INT = {"population_size", "generations", "n_min", "n_max", "crossover_retry_limit"}
_GA_FLOAT = {"p_crossover", "p_mutation", "p_addition", "p_elimination"}
_BOUNDS = {f.name for f in fields(ParamBounds)}
_DATASET = {f.name for f in fields(DatasetSpec)}


def parse_config(raw: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    """Validate a decoded JSON document. Unknown keys anywhere are errors."""
    top = _take(raw, {"dataset", "ga", "grad", "ridge", "stop_error", "seed", "output_dir"}, "")

    ds = _take(top.get("dataset", {}), _DATASET, "dataset")
    ds_kwargs: dict[str, Any] = {}
    if "builtin" in ds:
        if ds["builtin"] is not None:
            try:
                get_target(ds["builtin"])
            except (KeyError, TypeError) as exc:
                raise ConfigError("dataset.builtin", str(exc)) from None
        ds_kwargs["builtin"] = ds["builtin"]
    if "range" in ds:
        lo, hi = _pair(ds["range"], "dataset.range")
        if not lo < hi:
            raise ConfigError("dataset.range", f"need lo < hi, got [{lo}, {hi}]")
        ds_kwargs["range"] = (lo, hi)
    if "n_train" in ds:
        ds_kwargs["n_train"] = _integer(ds["n_train"], "dataset.n_train")
        if ds_kwargs["n_train"] < 2:
            raise ConfigError("dataset.n_train", "need at least 2 points")
    if "n_test" in ds:
        ds_kwargs["n_test"] = _integer(ds["n_test"], "dataset.n_test")
        if ds_kwargs["n_test"] < 0:
            raise ConfigError("dataset.n_test", "must be >= 0")
    for key in ("train_csv", "test_csv"):
        if key in ds and ds[key] is not None:
            if not isinstance(ds[key], str):
                raise ConfigError(f"dataset.{key}", "expected a path string")
            ds_kwargs[key] = ds[key]
    if ds_kwargs.get("test_csv") and not ds_kwargs.get("train_csv"):
        raise ConfigError("dataset.test_csv", "requires dataset.train_csv")
    if not ds_kwargs.get("train_csv") and ds_kwargs.get("builtin", "g2") is None:
        raise ConfigError("dataset", "either builtin or train_csv is required")
    dataset = DatasetSpec(**ds_kwargs)

    ga_raw = _take(top.get("ga", {}), _GA_INT | _GA_FLOAT | {"bounds"}, "ga")
    ga_kwargs: dict[str, Any] = {}
    for key, value in ga_raw.items():
        if key in _GA_INT:
            ga_kwargs[key] = _integer(value, f"ga.{key}")
        elif key in _GA_FLOAT:
            ga_kwargs[key] = _number(value, f"ga.{key}")
    bounds_raw = _take(ga_raw.get("bounds", {}), _BOUNDS, "ga.bounds")
    bounds = _build(ParamBounds, {k: _pair(v, f"ga.bounds.{k}") for k, v in bounds_raw.items()},
                    "ga.bounds")
    if "seed" in top:
        seed = _integer(top["seed"], "seed")
        if seed < 0:
            raise ConfigError("seed", "must be >= 0")
        ga_kwargs["seed"] = seed
    ga = _build(GaConfig, {**ga_kwargs, "bounds": bounds}, "ga")

    grad_raw = _take(top.get("grad", {}), {"learning_rate", "max_iterations"}, "grad")
    grad_kwargs: dict[str, Any] = {}
    if "learning_rate" in grad_raw:
        grad_kwargs["learning_rate"] = _number(grad_raw["learning_rate"], "grad.learning_rate")
    if "max_iterations" in grad_raw:
        grad_kwargs["max_iterations"] = _integer(grad_raw["max_iterations"], "grad.max_iterations")
    grad = _build(GradientConfig, {**grad_kwargs, "bounds": bounds}, "grad")

    run_kwargs: dict[str, Any] = {"ga": ga, "grad": grad}
    for key in ("ridge", "stop_error"):
        if key in top:
            run_kwargs[key] = _number(top[key], key)
    run = _build(RunConfig, run_kwargs, "")

    output_dir = top.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("output_dir", "expected a path string")
    return ExperimentConfig(dataset=dataset, run=run, output_dir=output_dir, base_dir=base_dir)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"{path}: invalid JSON ({exc})") from None
    return parse_config(raw, base_dir=path.parent)


def default_config_text() -> str:
    return resources.files("bbfnn").joinpath("default_config.json").read_text(encoding="utf-8")


def default_config() -> ExperimentConfig:
    return parse_config(json.loads(default_config_text()))

"""Target functions, sampling grids and CSV ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .core import DomainError

G2_POLE = -1.4


@dataclass(frozen=True)
class Sample:
    x: float
    y_true: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y_true)):
            raise ValueError(f"sample values must be finite, got ({self.x!r}, {self.y_true!r})")


class Dataset:
    """Ordered, immutable pairs of inputs and targets.

    Order matters: the online gradient learner visits samples as stored.
    """

    def __init__(self, x, y, label: str = ""):
        x = np.array(x, dtype=float).ravel()
        y = np.array(y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError(f"x has {x.size} values but y has {y.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset values must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        self._x = x
        self._y = y
        self.label = label

    @classmethod
    def from_samples(cls, samples, label: str = "") -> "Dataset":
        samples = list(samples)
        return cls([s.x for s in samples], [s.y_true for s in samples], label)

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def samples(self) -> list[Sample]:
        return [Sample(float(a), float(b)) for a, b in zip(self._x, self._y)]

    def __len__(self) -> int:
        return self._x.size

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def __repr__(self) -> str:
        return f"Dataset(label={self.label!r}, n={len(self)})"


def g2_eval(x: float) -> float:
    """``10 * arctan((x - 0.2)(x - 0.7)(x + 0.8) / (x + 1.4))``."""
    if x == G2_POLE:
        raise DomainError(f"g2 has a pole at x={G2_POLE}")
    return 10.0 * math.atan((x - 0.2) * (x - 0.7) * (x + 0.8) / (x + 1.4))


TARGETS: dict[str, Callable[[float], float]] = {"g2": g2_eval}


def get_target(name: str) -> Callable[[float], float]:
    try:
        return TARGETS[name]
    except KeyError:
        raise KeyError(f"unknown target function {name!r}; known: {sorted(TARGETS)}") from None


def uniform_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    xs = np.linspace(lo, hi, n)
    xs[0], xs[-1] = lo, hi
    return xs


def sample_uniform(fn: Callable[[float], float], lo: float, hi: float, n: int,
                   label: str = "") -> Dataset:
    """``n`` equally spaced points on ``[lo, hi]`` including both endpoints."""
    xs = uniform_grid(lo, hi, n)
    ys = []
    for x in xs:
        try:
            ys.append(fn(float(x)))
        except (DomainError, ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"target undefined at grid point x={float(x)!r}: {exc}") from exc
    return Dataset(xs, ys, label)


def sample_interleaved(fn: Callable[[float], float], lo: float, hi: float, n: int,
                       label: str = "") -> Dataset:
    """``n`` cell midpoints of an even partition of ``[lo, hi]``.

    Used for held-out grids so that test points fall between training points.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if n < 1:
        raise ValueError(f"need at least 1 point, got {n}")
    step = (hi - lo) / n
    xs = lo + step * (np.arange(n) + 0.5)
    return Dataset(xs, [fn(float(x)) for x in xs], label)


def load_csv(path) -> Dataset:
    """Read two numeric columns ``x, y``; a single leading header line is skipped."""
    path = Path(path)
    xs: list[float] = []
    ys: list[float] = []
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                if lineno == 1 and not xs:
                    continue
                raise ValueError(f"{path}:{lineno}: cannot parse {row!r} as numbers") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"{path}:{lineno}: non-finite value in {row!r}")
            xs.append(x)
            ys.append(y)
    if not xs:
        raise ValueError(f"{path}: no data rows")
    return Dataset(xs, ys, label=path.stem)


def save_csv(dataset: Dataset, path, header: bool = True) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(["x", "y"])
        for x, y in zip(dataset.x, dataset.y):
            w.writerow([repr(float(x)), repr(float(y))])


def g2_experiment(n_train: int = 201, n_test: int = 126, lo: float = -1.0,
                  hi: float = 1.0) -> tuple[Dataset, Dataset]:
    """Default train/test grids for the g2 benchmark."""
    train = sample_uniform(g2_eval, lo, hi, n_train, label="g2-train")
    test = sample_interleaved(g2_eval, lo, hi, n_test, label="g2-test")
    return train, test

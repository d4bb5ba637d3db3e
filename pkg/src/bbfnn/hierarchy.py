"""Two-level training: GA for structure, then gradient refinement of the champion."""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .core import BetaNetwork, InvalidParameter, training_error
from .evolution import (
    Chromosome,
    GaConfig,
    OperatorStats,
    best_index,
    decode,
    evaluate_population,
    initial_population,
    next_generation,
)
from .gradient import GradientConfig, refine

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    ga: GaConfig = field(default_factory=GaConfig)
    grad: GradientConfig = field(default_factory=GradientConfig)
    ridge: float = 1e-10
    stop_error: float = 0.01

    def __post_init__(self):
        if not (self.ridge >= 0 and math.isfinite(self.ridge)):
            raise InvalidParameter("ridge", f"must be a finite value >= 0, got {self.ridge!r}")
        if not self.stop_error >= 0:
            raise InvalidParameter("stop_error", f"must be >= 0, got {self.stop_error!r}")

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, ga=replace(self.ga, seed=seed))


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness1: float
    best_fitness2: float
    mean_gene_count: float


@dataclass
class RunReport:
    final_network: BetaNetwork
    training_error: float
    generalization_error: Optional[float]
    n_units: int
    generations_run: int
    grad_iterations: int
    history: list[GenerationRecord]
    seed: int
    ga_training_error: float = math.nan
    stopped_early: bool = False
    operator_stats: OperatorStats = field(default_factory=OperatorStats)

    def scalars(self) -> dict:
        """Every scalar field, in a fixed key order."""
        return {
            "seed": self.seed,
            "training_error": self.training_error,
            "generalization_error": self.generalization_error,
            "n_units": self.n_units,
            "generations_run": self.generations_run,
            "grad_iterations": self.grad_iterations,
            "ga_training_error": self.ga_training_error,
            "stopped_early": self.stopped_early,
        }


def run(cfg: RunConfig, train, test=None,
        on_generation: Optional[Callable[[int, list, list], None]] = None) -> RunReport:
    """Evolve hidden layers, then refine the best one by gradient descent.

    The GA stops after ``cfg.ga.generations`` generations, or earlier once the
    champion's training error is below ``cfg.stop_error``. The champion is the
    member with the highest fitness2; its least-squares network is handed to
    :func:`refine` with ``target_error = cfg.stop_error``.

    ``on_generation(gen, population, evaluations)`` is called once per
    evaluated generation.
    """
    if train is None or len(train) == 0:
        raise ValueError("training set is empty")
    ga = cfg.ga
    stats = OperatorStats()
    population = initial_population(ga)
    history: list[GenerationRecord] = []
    stopped_early = False
    for gen in range(ga.generations):
        evals = evaluate_population(population, train, ga, cfg.ridge)
        best = best_index(evals)
        if on_generation is not None:
            on_generation(gen, list(population), evals)
        history.append(GenerationRecord(
            generation=gen,
            best_fitness1=evals[best].fitness1,
            best_fitness2=evals[best].fitness2,
            mean_gene_count=sum(c.n_genes for c in population) / len(population),
        ))
        log.debug("generation %d: best f1=%.6g f2=%.6g", gen, evals[best].fitness1, evals[best].fitness2)
        if evals[best].training_error < cfg.stop_error:
            stopped_early = True
            break
        if gen + 1 < ga.generations:
            population = next_generation(population, train, ga, gen, evals, cfg.ridge, stats)

    champion: Chromosome = population[best]
    net = BetaNetwork(tuple(decode(champion)), tuple(float(w) for w in evals[best].weights))
    ga_error = training_error(net, train)
    grad_cfg = replace(cfg.grad, target_error=cfg.stop_error)
    net, iterations, err = refine(net, train, grad_cfg)
    gen_err = training_error(net, test) if test is not None and len(test) else None
    return RunReport(
        final_network=net,
        training_error=err,
        generalization_error=gen_err,
        n_units=len(net),
        generations_run=len(history),
        grad_iterations=iterations,
        history=history,
        seed=ga.seed,
        ga_training_error=ga_error,
        stopped_early=stopped_early,
        operator_stats=stats,
    )


@dataclass(frozen=True)
class SummaryRow:
    field: str
    minimum: Optional[float]
    median: Optional[float]
    maximum: Optional[float]


def compare_runs(reports: Sequence[RunReport]) -> list[SummaryRow]:
    """min/median/max of training error, generalization error and unit count."""
    if not reports:
        raise ValueError("no reports to compare")
    rows = []
    for name in ("training_error", "generalization_error", "n_units"):
        values = [getattr(r, name) for r in reports]
        values = [v for v in values if v is not None]
        if values:
            rows.append(SummaryRow(name, min(values), statistics.median(values), max(values)))
        else:
            rows.append(SummaryRow(name, None, None, None))
    return rows

"""Variable-length genetic algorithm over Beta-network hidden layers.

A chromosome is a flat chain of reals, four per gene, each gene holding one
hidden unit's (center, width, p, q). Genes inside a chromosome are kept
pairwise distinct and the gene count stays within ``[n_min, n_max]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import BetaUnit, InvalidParameter, activations, solve_weights_matrix

GENE_SIZE = 4


def _check_range(name: str, rng, positive: bool = False) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in rng)
    except (TypeError, ValueError):
        raise InvalidParameter(name, f"expected a [lo, hi] pair, got {rng!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise InvalidParameter(name, f"need finite lo < hi, got [{lo}, {hi}]")
    if positive and lo <= 0:
        raise InvalidParameter(name, f"lower bound must be > 0, got {lo}")
    return lo, hi


@dataclass(frozen=True)
class ParamBounds:
    """Sampling and clamping box for the four gene parameters."""

    center_range: tuple[float, float] = (-1.0, 1.0)
    width_range: tuple[float, float] = (1e-3, 1.0)
    p_range: tuple[float, float] = (1e-3, 4.0)
    q_range: tuple[float, float] = (1e-3, 4.0)

    def __post_init__(self):
        object.__setattr__(self, "center_range", _check_range("center_range", self.center_range))
        object.__setattr__(self, "width_range", _check_range("width_range", self.width_range, True))
        object.__setattr__(self, "p_range", _check_range("p_range", self.p_range, True))
        object.__setattr__(self, "q_range", _check_range("q_range", self.q_range, True))

    def lows(self) -> np.ndarray:
        return np.array([r[0] for r in self._ranges()])

    def highs(self) -> np.ndarray:
        return np.array([r[1] for r in self._ranges()])

    def _ranges(self):
        return (self.center_range, self.width_range, self.p_range, self.q_range)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``(n, 4)`` array of genes drawn uniformly from the box."""
        lo, hi = self.lows(), self.highs()
        return lo + (hi - lo) * rng.random((n, GENE_SIZE))

    def contains(self, genes: np.ndarray) -> bool:
        genes = np.asarray(genes).reshape(-1, GENE_SIZE)
        return bool(np.all(genes >= self.lows()) and np.all(genes <= self.highs()))


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidParameter(name, f"must be a probability in [0, 1], got {value!r}")


def _check_positive_int(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise InvalidParameter(name, f"must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    generations: int = 100
    n_min: int = 5
    n_max: int = 20
    p_crossover: float = 0.8
    p_mutation: float = 0.02
    p_addition: float = 0.1
    p_elimination: float = 0.1
    crossover_retry_limit: int = 10
    bounds: ParamBounds = field(default_factory=ParamBounds)
    seed: int = 0

    def __post_init__(self):
        for name in ("population_size", "generations", "n_min", "n_max", "crossover_retry_limit"):
            _check_positive_int(name, getattr(self, name))
        if self.n_min > self.n_max:
            raise InvalidParameter("n_min", f"must be <= n_max ({self.n_max}), got {self.n_min}")
        for name in ("p_crossover", "p_mutation", "p_addition", "p_elimination"):
            _check_probability(name, getattr(self, name))
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise InvalidParameter("seed", f"must be a non-negative integer, got {self.seed!r}")
        if not isinstance(self.bounds, ParamBounds):
            raise InvalidParameter("bounds", "must be a ParamBounds")


class Chromosome:
    """Immutable ordered list of distinct genes, stored as a ``(n, 4)`` array."""

    __slots__ = ("_genes",)

    def __init__(self, genes):
        genes = np.array(genes, dtype=float)
        if genes.ndim == 1:
            if genes.size % GENE_SIZE:
                raise ValueError(f"flat length {genes.size} is not a multiple of {GENE_SIZE}")
            genes = genes.reshape(-1, GENE_SIZE)
        if genes.ndim != 2 or genes.shape[1] != GENE_SIZE:
            raise ValueError(f"genes must have shape (n, {GENE_SIZE}), got {genes.shape}")
        if not np.all(np.isfinite(genes)):
            raise ValueError("genes must be finite")
        if len(_duplicate_rows(genes)):
            raise ValueError("chromosome genes must be pairwise distinct")
        genes.setflags(write=False)
        self._genes = genes

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "Chromosome":
        return cls(np.asarray(values, dtype=float).ravel())

    @property
    def genes(self) -> np.ndarray:
        return self._genes

    @property
    def flat(self) -> np.ndarray:
        return self._genes.ravel()

    @property
    def n_genes(self) -> int:
        return self._genes.shape[0]

    def __len__(self) -> int:
        """Flat chain length (four values per gene)."""
        return self._genes.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chromosome):
            return NotImplemented
        return self._genes.shape == other._genes.shape and bool(np.array_equal(self._genes, other._genes))

    def __hash__(self) -> int:
        return hash(self._genes.tobytes())

    def __repr__(self) -> str:
        return f"Chromosome(n_genes={self.n_genes})"

    def permuted(self, order: Sequence[int]) -> "Chromosome":
        return Chromosome(self._genes[list(order)])


def _duplicate_rows(genes: np.ndarray) -> list[int]:
    """Indices of rows that repeat an earlier row exactly."""
    seen: set[bytes] = set()
    dups = []
    for i, row in enumerate(genes):
        # +0.0 folds -0.0 into 0.0 so value equality, not bit equality, decides.
        key = (row + 0.0).tobytes()
        if key in seen:
            dups.append(i)
        else:
            seen.add(key)
    return dups


def _resample_duplicates(genes: np.ndarray, bounds: ParamBounds, rng: np.random.Generator) -> np.ndarray:
    genes = np.array(genes, dtype=float)
    while True:
        dups = _duplicate_rows(genes)
        if not dups:
            return genes
        genes[dups] = bounds.sample(rng, len(dups))


def is_valid(chrom: Chromosome, cfg: GaConfig) -> bool:
    return (
        cfg.n_min <= chrom.n_genes <= cfg.n_max
        and len(chrom) % GENE_SIZE == 0
        and not _duplicate_rows(chrom.genes)
        and cfg.bounds.contains(chrom.genes)
    )


@dataclass
class OperatorStats:
    crossovers: int = 0
    crossover_exhausted: int = 0
    crossover_duplicates: int = 0
    mutated_values: int = 0
    additions: int = 0
    eliminations: int = 0

    def merge(self, other: "OperatorStats") -> None:
        for name in self.__dataclass_fields__:
            setattr(self, name, getattr(self, name) + getattr(other, name))


def random_chromosome(cfg: GaConfig, rng: np.random.Generator) -> Chromosome:
    n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
    genes = _resample_duplicates(cfg.bounds.sample(rng, n), cfg.bounds, rng)
    return Chromosome(genes)


def initial_population(cfg: GaConfig) -> list[Chromosome]:
    return [
        random_chromosome(cfg, np.random.default_rng([cfg.seed, 0, i]))
        for i in range(cfg.population_size)
    ]


def decode(chrom: Chromosome) -> list[BetaUnit]:
    return [BetaUnit(*map(float, row)) for row in chrom.genes]


def encode(units: Sequence[BetaUnit]) -> Chromosome:
    return Chromosome([u.as_tuple() for u in units])


@dataclass(frozen=True)
class Evaluation:
    fitness1: float
    fitness2: float
    weights: np.ndarray

    @property
    def training_error(self) -> float:
        return 0.5 * self.fitness1


def fit_weights(chrom: Chromosome, train, ridge: float = 1e-10) -> tuple[float, np.ndarray]:
    """Least-squares output weights and the resulting sum of squared residuals."""
    phi = activations(chrom.genes, train.x)
    w = solve_weights_matrix(phi, train.y, ridge)
    r = train.y - phi @ w
    return float(r @ r), w


def fitness1(chrom: Chromosome, train, ridge: float = 1e-10) -> float:
    """Sum of squared residuals of the decoded network with solved weights."""
    return fit_weights(chrom, train, ridge)[0]


def fitness2(f1: float, n_c: int, cfg: GaConfig) -> float:
    """Parsimony-weighted score ``(ln(Nmax-nc+1) + ln(nc-Nmin+1)) / (1 + f1)``."""
    if not cfg.n_min <= n_c <= cfg.n_max:
        raise ValueError(f"gene count {n_c} outside [{cfg.n_min}, {cfg.n_max}]")
    if f1 < 0:
        raise ValueError(f"fitness1 must be >= 0, got {f1!r}")
    size_term = math.log(cfg.n_max - n_c + 1) + math.log(n_c - cfg.n_min + 1)
    return size_term * (1.0 / (1.0 + f1))


def evaluate(chrom: Chromosome, train, cfg: GaConfig, ridge: float = 1e-10) -> Evaluation:
    f1, w = fit_weights(chrom, train, ridge)
    return Evaluation(f1, fitness2(f1, chrom.n_genes, cfg), w)


def evaluate_population(population: Sequence[Chromosome], train, cfg: GaConfig,
                        ridge: float = 1e-10) -> list[Evaluation]:
    return [evaluate(c, train, cfg, ridge) for c in population]


def roulette_select(population: Sequence, fitnesses: Sequence[float], rng: np.random.Generator) -> int:
    """Index drawn with probability proportional to its fitness."""
    f = np.asarray(fitnesses, dtype=float)
    if len(population) != f.size:
        raise ValueError(f"{len(population)} individuals but {f.size} fitness values")
    if f.size == 0:
        raise ValueError("cannot select from an empty population")
    if np.any(f < 0) or not np.all(np.isfinite(f)):
        raise ValueError("fitness values must be finite and >= 0")
    total = f.sum()
    if total <= 0:
        return int(rng.integers(f.size))
    cum = np.cumsum(f)
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(idx, f.size - 1)


def cut_and_splice(a: np.ndarray, b: np.ndarray, p1: int, p2: int) -> tuple[np.ndarray, np.ndarray]:
    """One-point crossover of two flat chains at possibly different cut points.

    Returns ``(child1, child2)`` where ``child1 = b[:p2] + a[p1:]`` and
    ``child2 = a[:p1] + b[p2:]``.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if not (0 <= p1 <= a.size and 0 <= p2 <= b.size):
        raise ValueError(f"cut points ({p1}, {p2}) out of range for lengths ({a.size}, {b.size})")
    return np.concatenate([b[:p2], a[p1:]]), np.concatenate([a[:p1], b[p2:]])


def _drop_duplicates(flat: np.ndarray) -> np.ndarray:
    genes = flat.reshape(-1, GENE_SIZE)
    dups = _duplicate_rows(genes)
    return np.delete(genes, dups, axis=0) if dups else genes


def crossover(a: Chromosome, b: Chromosome, cfg: GaConfig, rng: np.random.Generator,
              stats: Optional[OperatorStats] = None) -> tuple[Chromosome, Chromosome]:
    """Length-changing one-point crossover.

    The second cut is drawn at the same offset within a gene as the first, so
    children keep whole genes. Cuts producing an out-of-range child are
    redrawn up to ``crossover_retry_limit`` times, after which the parents
    come back unchanged.
    """
    if not rng.random() < cfg.p_crossover:
        return a, b
    l1, l2 = len(a), len(b)
    lo, hi = GENE_SIZE * cfg.n_min, GENE_SIZE * cfg.n_max
    p1 = int(rng.integers(1, l1)) if l1 > 1 else 0
    offset = p1 % GENE_SIZE
    n_slots = (l2 - offset) // GENE_SIZE + 1
    for _ in range(cfg.crossover_retry_limit):
        p2 = offset + GENE_SIZE * int(rng.integers(n_slots))
        if lo <= l1 - p1 + p2 <= hi and lo <= l2 - p2 + p1 <= hi:
            break
    else:
        if stats is not None:
            stats.crossover_exhausted += 1
        return a, b
    c1, c2 = cut_and_splice(a.flat, b.flat, p1, p2)
    g1, g2 = _drop_duplicates(c1), _drop_duplicates(c2)
    if g1.shape[0] < cfg.n_min or g2.shape[0] < cfg.n_min:
        if stats is not None:
            stats.crossover_duplicates += 1
        return a, b
    if stats is not None:
        stats.crossovers += 1
    return Chromosome(g1), Chromosome(g2)


def mutate(chrom: Chromosome, cfg: GaConfig, rng: np.random.Generator,
           stats: Optional[OperatorStats] = None) -> Chromosome:
    """Replace each value, with probability ``p_mutation``, by a fresh uniform draw."""
    n = chrom.n_genes
    mask = rng.random((n, GENE_SIZE)) < cfg.p_mutation
    fresh = cfg.bounds.sample(rng, n)
    if not mask.any():
        return chrom
    if stats is not None:
        stats.mutated_values += int(mask.sum())
    genes = np.where(mask, fresh, chrom.genes)
    return Chromosome(_resample_duplicates(genes, cfg.bounds, rng))


def add_gene(chrom: Chromosome, cfg: GaConfig, rng: np.random.Generator,
             stats: Optional[OperatorStats] = None) -> Chromosome:
    """With probability ``p_addition`` append one random gene (one more neuron)."""
    fires = rng.random() < cfg.p_addition
    if not fires or chrom.n_genes >= cfg.n_max:
        return chrom
    genes = np.vstack([chrom.genes, cfg.bounds.sample(rng, 1)])
    if stats is not None:
        stats.additions += 1
    return Chromosome(_resample_duplicates(genes, cfg.bounds, rng))


def eliminate_gene(chrom: Chromosome, cfg: GaConfig, rng: np.random.Generator,
                   stats: Optional[OperatorStats] = None) -> Chromosome:
    """With probability ``p_elimination`` drop one uniformly chosen gene."""
    fires = rng.random() < cfg.p_elimination
    if not fires or chrom.n_genes <= cfg.n_min:
        return chrom
    victim = int(rng.integers(chrom.n_genes))
    if stats is not None:
        stats.eliminations += 1
    return Chromosome(np.delete(chrom.genes, victim, axis=0))


def best_index(evaluations: Sequence[Evaluation]) -> int:
    """Index of the highest fitness2 (first one on ties)."""
    return int(np.argmax([e.fitness2 for e in evaluations]))


def next_generation(population: Sequence[Chromosome], train, cfg: GaConfig, generation: int,
                    evaluations: Optional[Sequence[Evaluation]] = None, ridge: float = 1e-10,
                    stats: Optional[OperatorStats] = None) -> list[Chromosome]:
    """Breed the population that follows ``population``.

    The best member is copied unchanged; every other slot comes from a
    roulette-selected pair passed through crossover, mutation, addition and
    elimination. Each pair draws from its own stream seeded by
    ``(seed, generation + 1, pair index)``.
    """
    if evaluations is None:
        evaluations = evaluate_population(population, train, cfg, ridge)
    size = len(population)
    fit2 = [e.fitness2 for e in evaluations]
    out = [population[best_index(evaluations)]]
    pair = 0
    while len(out) < size:
        rng = np.random.default_rng([cfg.seed, generation + 1, pair])
        i = roulette_select(population, fit2, rng)
        j = roulette_select(population, fit2, rng)
        children = crossover(population[i], population[j], cfg, rng, stats)
        for child in children:
            child = mutate(child, cfg, rng, stats)
            child = add_gene(child, cfg, rng, stats)
            child = eliminate_gene(child, cfg, rng, stats)
            if len(out) < size:
                out.append(child)
        pair += 1
    return out

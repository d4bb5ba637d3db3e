import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbfnn.core import BetaUnit, InvalidParameter
from bbfnn.data import Dataset
from bbfnn.evolution import (
    Chromosome,
    GaConfig,
    OperatorStats,
    ParamBounds,
    add_gene,
    crossover,
    cut_and_splice,
    decode,
    eliminate_gene,
    encode,
    evaluate_population,
    fitness1,
    fitness2,
    initial_population,
    is_valid,
    mutate,
    next_generation,
    random_chromosome,
    roulette_select,
)

TWO_GENES = [-0.9, 0.7, 1, 0.5, 0, 0.9, 0.3, 2]
THREE_GENES = [-0.1, 0.5, 2, 3, -1, 0.7, 1, 2, 1, 0.5, 0.1, 0.9]
DEFAULT_SIZES = GaConfig(n_min=5, n_max=20)


def rng(seed=0):
    return np.random.default_rng(seed)


def test_bounds_validation():
    with pytest.raises(InvalidParameter, match="width_range"):
        ParamBounds(width_range=(-1, 1))
    with pytest.raises(InvalidParameter, match="p_range"):
        ParamBounds(p_range=(0, 4))
    with pytest.raises(InvalidParameter, match="center_range"):
        ParamBounds(center_range=(1, -1))


@pytest.mark.parametrize("field, value", [("p_crossover", 1.5), ("p_mutation", -0.1), ("n_min", 0),
                                          ("population_size", 0), ("crossover_retry_limit", 0)])
def test_ga_config_validation(field, value):
    with pytest.raises(InvalidParameter, match=field):
        GaConfig(**{field: value})
    with pytest.raises(InvalidParameter, match="n_min"):
        GaConfig(n_min=6, n_max=5)


def test_chromosome_rejects_duplicates_and_ragged_chains():
    with pytest.raises(ValueError):
        Chromosome.from_flat(TWO_GENES + TWO_GENES[:4])
    with pytest.raises(ValueError):
        Chromosome.from_flat(TWO_GENES[:7])


def test_decode_two_gene_chain():
    units = decode(Chromosome.from_flat(TWO_GENES))
    assert units == [BetaUnit(-0.9, 0.7, 1, 0.5), BetaUnit(0, 0.9, 0.3, 2)]
    assert decode(Chromosome.from_flat(TWO_GENES[:4])) == [BetaUnit(-0.9, 0.7, 1, 0.5)]
    chrom = Chromosome.from_flat(TWO_GENES)
    assert encode(decode(chrom)) == chrom


def test_random_chromosome_degenerate_range():
    cfg = GaConfig(n_min=5, n_max=5)
    for s in range(20):
        assert random_chromosome(cfg, rng(s)).n_genes == 5


def test_random_chromosome_valid_and_deterministic():
    for s in range(50):
        c = random_chromosome(DEFAULT_SIZES, rng(s))
        assert is_valid(c, DEFAULT_SIZES)
        assert c == random_chromosome(DEFAULT_SIZES, rng(s))


def test_fitness1_examples():
    chrom = Chromosome.from_flat([0.0, 2.0, 1.0, 1.0])
    assert fitness1(chrom, Dataset([0.0, 0.5], [2.0, 1.5]), ridge=0) == pytest.approx(0.0, abs=1e-28)
    # one sample beyond the support: prediction 0, residual 0.5
    assert fitness1(chrom, Dataset([3.0], [0.5]), ridge=0) == 0.25


def test_fitness2_examples():
    assert fitness2(0.0, 8, DEFAULT_SIZES) == pytest.approx(math.log(13) + math.log(4), rel=1e-15)
    assert fitness2(0.0, 8, DEFAULT_SIZES) == pytest.approx(3.9512, abs=1e-4)
    assert fitness2(0.0, 20, DEFAULT_SIZES) == pytest.approx(2.7726, abs=1e-4)
    assert fitness2(1.0, 12, DEFAULT_SIZES) == fitness2(0.0, 12, DEFAULT_SIZES) / 2
    with pytest.raises(ValueError):
        fitness2(0.0, 21, DEFAULT_SIZES)
    with pytest.raises(ValueError):
        fitness2(0.0, 4, DEFAULT_SIZES)


@given(st.integers(5, 20), st.floats(0, 1e6), st.floats(0, 1e6))
def test_fitness2_symmetric_and_decreasing(nc, f1, f1b):
    assert fitness2(f1, nc, DEFAULT_SIZES) == pytest.approx(fitness2(f1, 25 - nc, DEFAULT_SIZES), rel=1e-14)
    lo, hi = sorted((f1, f1b))
    assert fitness2(hi, nc, DEFAULT_SIZES) <= fitness2(lo, nc, DEFAULT_SIZES)
    # the size term peaks at the middle of [n_min, n_max]
    assert fitness2(f1, nc, DEFAULT_SIZES) <= max(fitness2(f1, 12, DEFAULT_SIZES), fitness2(f1, 13, DEFAULT_SIZES))


def test_roulette_examples():
    assert roulette_select(["a"], [0.7], rng()) == 0
    r = rng(123)
    draws = np.array([roulette_select([0, 1], [2.0, 1.0], r) for _ in range(100_000)])
    freq = np.bincount(draws, minlength=2) / draws.size
    assert freq == pytest.approx([2 / 3, 1 / 3], abs=0.01)


def test_roulette_all_zero_is_uniform():
    r = rng(9)
    draws = np.array([roulette_select(range(4), [0, 0, 0, 0], r) for _ in range(20_000)])
    assert np.bincount(draws, minlength=4) / draws.size == pytest.approx([0.25] * 4, abs=0.02)


def test_roulette_never_picks_zero_fitness():
    r = rng(1)
    assert {roulette_select(range(3), [0.0, 1.0, 0.0], r) for _ in range(1000)} == {1}


def test_cut_and_splice_lengths():
    a = np.arange(24.0)
    b = 100 + np.arange(40.0)
    c1, c2 = cut_and_splice(a, b, 8, 12)
    assert (c1.size, c2.size) == (24 - 8 + 12, 40 - 12 + 8) == (28, 36)
    assert list(c2[:8]) == list(a[:8]) and list(c2[8:]) == list(b[12:])
    assert list(c1[:12]) == list(b[:12]) and list(c1[12:]) == list(a[8:])


def test_crossover_disabled():
    cfg = replace(DEFAULT_SIZES, p_crossover=0.0)
    a = random_chromosome(cfg, rng(1))
    b = random_chromosome(cfg, rng(2))
    for s in range(50):
        assert crossover(a, b, cfg, rng(s)) == (a, b)


def test_self_crossover_at_equal_cuts_returns_parents():
    a = random_chromosome(DEFAULT_SIZES, rng(3))
    c1, c2 = cut_and_splice(a.flat, a.flat, 9, 9)
    assert Chromosome(c1) == a and Chromosome(c2) == a


def test_crossover_keeps_gene_alignment_and_length_bounds():
    cfg = replace(DEFAULT_SIZES, p_crossover=1.0)
    stats = OperatorStats()
    for s in range(300):
        r = rng(s)
        a = random_chromosome(cfg, r)
        b = random_chromosome(cfg, r)
        c1, c2 = crossover(a, b, cfg, r, stats)
        assert is_valid(c1, cfg) and is_valid(c2, cfg)
        assert c1.n_genes + c2.n_genes == a.n_genes + b.n_genes or (c1, c2) == (a, b)
    assert stats.crossovers > 0


def test_crossover_exhaustion_returns_parents():
    # With n_min = n_max = 2 both children must have 8 values, but parents of
    # 8 and 12 values always yield children whose lengths sum to 20.
    cfg = GaConfig(n_min=2, n_max=2, p_crossover=1.0, crossover_retry_limit=3)
    a = Chromosome([[0, 1, 1, 1], [0.5, 1, 1, 1]])
    b = Chromosome([[0.1, 1, 1, 1], [0.2, 1, 1, 1], [0.3, 1, 1, 1]])
    stats = OperatorStats()
    for s in range(20):
        assert crossover(a, b, cfg, rng(s), stats) == (a, b)
    assert stats.crossover_exhausted == 20


def test_crossover_drops_duplicate_genes():
    g = [[0.0, 1, 1, 1], [0.1, 1, 1, 1], [0.2, 1, 1, 1]]
    a = Chromosome(g)
    b = Chromosome([g[1], g[2], g[0]])
    cfg = GaConfig(n_min=1, n_max=6, p_crossover=1.0)
    for s in range(100):
        for child in crossover(a, b, cfg, rng(s)):
            assert is_valid(child, cfg)


def test_mutation_examples():
    c = random_chromosome(DEFAULT_SIZES, rng(5))
    assert mutate(c, replace(DEFAULT_SIZES, p_mutation=0.0), rng(1)) == c
    full = replace(DEFAULT_SIZES, p_mutation=1.0)
    for s in range(30):
        m = mutate(c, full, rng(s))
        assert m.n_genes == c.n_genes
        assert is_valid(m, full)
        assert not np.any(m.genes == c.genes)


def test_addition_examples():
    cfg = replace(GaConfig(n_min=1, n_max=20), p_addition=1.0)
    c = Chromosome.from_flat(TWO_GENES)
    grown = add_gene(c, cfg, rng())
    assert len(c) == 8 and len(grown) == 12
    assert list(grown.flat[:8]) == TWO_GENES
    assert add_gene(c, replace(cfg, p_addition=0.0), rng()) == c
    full = Chromosome(np.column_stack([np.linspace(-1, 1, 20), np.full((20, 3), 0.5)]))
    assert add_gene(full, cfg, rng()) == full


def test_elimination_examples():
    cfg = replace(GaConfig(n_min=2, n_max=20), p_elimination=1.0)
    c = Chromosome.from_flat(THREE_GENES)
    shrunk = eliminate_gene(c, cfg, rng())
    assert len(shrunk) == 8
    kept = {tuple(g) for g in shrunk.genes}
    assert kept < {tuple(g) for g in c.genes}
    assert eliminate_gene(c, replace(cfg, p_elimination=0.0), rng()) == c
    assert eliminate_gene(shrunk, cfg, rng()) == shrunk


def test_elimination_can_remove_any_gene():
    cfg = replace(GaConfig(n_min=1, n_max=20), p_elimination=1.0)
    c = Chromosome.from_flat(THREE_GENES)
    removed = set()
    for s in range(200):
        left = {tuple(g) for g in eliminate_gene(c, cfg, rng(s)).genes}
        removed |= {tuple(g) for g in c.genes} - left
    assert len(removed) == 3


def test_fitness1_permutation_invariant(g2_data):
    train, _ = g2_data
    for s in range(20):
        r = rng(s)
        c = random_chromosome(DEFAULT_SIZES, r)
        f = fitness1(c, train)
        assert fitness1(c.permuted(r.permutation(c.n_genes)), train) == pytest.approx(f, rel=1e-9)


def test_next_generation_with_operators_disabled(small_data):
    cfg = GaConfig(population_size=12, n_min=2, n_max=6, p_crossover=0, p_mutation=0,
                   p_addition=0, p_elimination=0, seed=4)
    pop = initial_population(cfg)
    evals = evaluate_population(pop, small_data, cfg)
    new = next_generation(pop, small_data, cfg, 0, evals)
    assert len(new) == len(pop)
    best = int(np.argmax([e.fitness2 for e in evals]))
    assert new[0] == pop[best]
    assert all(any(c == p for p in pop) for c in new)


def test_next_generation_preserves_size_and_invariants(small_data):
    cfg = GaConfig(population_size=15, n_min=2, n_max=8, p_mutation=0.1, p_addition=0.3,
                   p_elimination=0.3, seed=8)
    pop = initial_population(cfg)
    best_prev = -math.inf
    for gen in range(30):
        evals = evaluate_population(pop, small_data, cfg)
        best = max(e.fitness2 for e in evals)
        assert best >= best_prev
        best_prev = best
        pop = next_generation(pop, small_data, cfg, gen, evals)
        assert len(pop) == 15
        assert all(is_valid(c, cfg) for c in pop)


def test_next_generation_is_deterministic(small_data):
    cfg = GaConfig(population_size=10, n_min=2, n_max=6, seed=21)
    pop = initial_population(cfg)
    a = next_generation(pop, small_data, cfg, 3)
    b = next_generation(pop, small_data, cfg, 3)
    assert a == b
    assert [c.genes.tobytes() for c in a] == [c.genes.tobytes() for c in b]

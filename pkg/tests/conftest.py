import numpy as np
import pytest

from bbfnn.data import Dataset, g2_experiment
from bbfnn.evolution import GaConfig
from bbfnn.gradient import GradientConfig
from bbfnn.hierarchy import RunConfig


@pytest.fixture(scope="session")
def g2_data():
    return g2_experiment()


@pytest.fixture
def small_data():
    x = np.linspace(-1, 1, 41)
    return Dataset(x, np.sin(3 * x), label="sin3")


@pytest.fixture
def tiny_run_config():
    ga = GaConfig(population_size=10, generations=5, n_min=2, n_max=6, seed=3)
    return RunConfig(ga=ga, grad=GradientConfig(max_iterations=20))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    def record(tag: str, ok: bool, detail: str) -> None:
        line = f"{tag} {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

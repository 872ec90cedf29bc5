import csv
from pathlib import Path

import numpy as np
import pytest

from hetbias.bias import VariancePattern
from hetbias.regressors import standardize

FIXTURES = Path(__file__).parent / "fixtures"
ROOT = Path(__file__).parent.parent

ACCEPTANCE_LINES: list[str] = []


def load_fixture(name):
    with open(FIXTURES / name, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def random_instance(rng, t_min=3, t_max=200):
    t = int(rng.integers(t_min, t_max + 1))
    raw = rng.standard_normal(t) * rng.uniform(0.1, 10) + rng.uniform(-5, 5)
    if rng.random() < 0.5:
        raw = np.exp(raw / np.std(raw))
    return standardize(raw), VariancePattern(rng.uniform(0, 3, t)), float(rng.uniform(0, 10))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

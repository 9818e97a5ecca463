import numpy as np
import pytest

from twistxxz import tables
from twistxxz.model import ChainParams

ETA = 1.0


@pytest.fixture(scope="session")
def bench():
    """Benchmark root pair (u, lambda) for eta = 1, N = 3, polished by Newton."""
    return tables.benchmark_roots(3, ETA)


@pytest.fixture(scope="session")
def hom3():
    return ChainParams.homogeneous(3, ETA)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def generic_params(n, seed=11, eta=ETA):
    """Non-degenerate inhomogeneous chain from a fixed seed."""
    from twistxxz.verify import random_thetas

    return ChainParams(n, eta, random_thetas(np.random.default_rng(seed), n))


ACCEPTANCE_LINES: dict = {}


def record_criterion(number: int, passed: bool, detail: str):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])

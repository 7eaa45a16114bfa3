import numpy as np
import pytest

from hilbertgame import canonical_pd

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def pd_game():
    return canonical_pd(3.0, 0.0, 5.0, 1.0)


@pytest.fixture
def pd_game_distinct():
    return canonical_pd(3.0, 1.0, 5.0, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20061016)


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_hermitian(rng, n):
    a = random_complex(rng, (n, n))
    return a + a.conj().T


def random_density(rng, n, rank=None):
    a = random_complex(rng, (n, rank or n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

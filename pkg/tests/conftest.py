from functools import lru_cache

import pytest

from rotmorse.coherent import cs_weights, evolve, periods
from rotmorse.eigen import build_basis
from rotmorse.rotor import I2, rotor_constants


@lru_cache(maxsize=None)
def basis_for(j: int):
    return build_basis(rotor_constants(I2, j))


@lru_cache(maxsize=None)
def packet_for(j: int, frac: float, alpha: float = 1.6):
    basis = basis_for(j)
    return evolve(basis, cs_weights(basis, alpha), frac * periods(basis.constants)[1])


@pytest.fixture(scope="session")
def basis0():
    return basis_for(0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

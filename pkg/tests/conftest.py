"""Shared fixtures: coefficient tables are expensive, so build them once per session."""

import pytest

from subconvex import arith
from subconvex.lfunc import GammaFactorSpec, RankinSelbergSeries
from subconvex.suites import coefficient_table

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def delta_small():
    return coefficient_table(20_000)


@pytest.fixture(scope="session")
def delta_100k():
    return coefficient_table(100_000)


@pytest.fixture(scope="session")
def divisor_small():
    return arith.divisor_sequence(20_000)


@pytest.fixture(scope="session")
def rs_series():
    f = coefficient_table(300_000)
    return RankinSelbergSeries(f, f)


@pytest.fixture(scope="session")
def gamma_hol():
    return GammaFactorSpec()


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

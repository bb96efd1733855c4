import time

import pytest

from qram_interference.scenario import monte_carlo

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def reference_mc():
    """100 runs of the reference scenario, shared by the slow checks."""
    start = time.perf_counter()
    result = monte_carlo(n_runs=100, base_seed=0)
    result.elapsed = time.perf_counter() - start
    return result

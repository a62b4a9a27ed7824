import pytest

from netexit.model import ModelParams
from netexit.simulator import RealizationConfig, Strategy, simulate_records

# the instance used for the distributional checks
SMALL = (1.0, 2.0, 0.5, 1.0, 5, 5.0)
SMALL_RUNS = 10**5
SMALL_SEED = 20240917


@pytest.fixture
def small():
    return ModelParams(*SMALL)


@pytest.fixture(scope="session")
def small_records():
    """10^5 epoch-first realizations of the small instance, shared across modules."""
    cfg = RealizationConfig(ModelParams(*SMALL), SMALL_SEED, Strategy.EPOCH_FIRST)
    return simulate_records(cfg, SMALL_RUNS)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

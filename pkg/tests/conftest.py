import numpy as np
import pytest

from dcsk_wpt.channel import LinkBudget, effective_gains


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def gains():
    """(eps1, eps2) for the default link budget: 30 dBm, 20 m, alpha 4."""
    return effective_gains(LinkBudget())


def within_sigma(sample, expected, n_sigma=3.0):
    """Sample mean within n_sigma standard errors of ``expected``."""
    sample = np.asarray(sample, dtype=float)
    se = sample.std(ddof=1) / np.sqrt(sample.size)
    return abs(sample.mean() - expected) <= n_sigma * se


# one PASS/FAIL line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)

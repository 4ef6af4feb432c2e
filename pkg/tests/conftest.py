import numpy as np
import pytest

from grwasim import ModelParams, InitialStateSpec, initial_coefficients

_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_results[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # one pass/fail line per acceptance criterion, independent of -s
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_results.items():
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")


@pytest.fixture(scope="session")
def snapshot_coeffs():
    """The fast qubit-snapshot scenario used across modules."""
    params = ModelParams(omega=1.0, delta=1.0, lam=0.1)
    spec = InitialStateSpec(alpha=0.5 + 0.0j, bell_sign=-1, params=params)
    return initial_coefficients(spec)


@pytest.fixture(scope="session")
def cat_coeffs():
    """Macroscopic-alpha scenario (kitten-regime parameters)."""
    params = ModelParams(omega=1.0, delta=0.8, lam=0.01)
    spec = InitialStateSpec(alpha=2.5 + 0.0j, bell_sign=-1, params=params)
    return initial_coefficients(spec)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)

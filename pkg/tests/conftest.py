import time
import warnings

import pytest
from hypothesis import HealthCheck, settings

from hemtq.fock import TruncationWarning

settings.register_profile(
    "hemtq", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("hemtq")


@pytest.fixture(autouse=True)
def _quiet_truncation():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield


class Timed:
    """Lazily run an expensive callable once per session and remember its cost."""

    def __init__(self, fn):
        self.fn = fn
        self._value = None
        self.seconds = None

    def get(self):
        if self.seconds is None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                t0 = time.perf_counter()
                self._value = self.fn()
                self.seconds = time.perf_counter() - t0
        return self._value


_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _RESULTS[report.nodeid] = report.outcome
    elif report.when == "setup" and report.outcome != "passed" and "test_acceptance" in report.nodeid:
        _RESULTS[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _RESULTS.items():
        name = nodeid.split("::")[-1]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")


def _desk(**changes):
    from dataclasses import replace

    from hemtq.config import profile_defaults

    return replace(profile_defaults("desk"), **changes)


@pytest.fixture(scope="session")
def desk_config():
    return _desk()


@pytest.fixture(scope="session")
def desk_runs():
    """Desk-profile runs of every scenario, each executed at most once."""
    from hemtq.scenarios import run_coherence, run_full, run_reduced, run_sweep

    cfg = _desk()
    return {
        "reduced": Timed(lambda: run_reduced(cfg)),
        "full": Timed(lambda: run_full(cfg)),
        "coherence": Timed(lambda: run_coherence(cfg)),
        "sweep": Timed(lambda: run_sweep(cfg)),
        "full_dims10": Timed(lambda: run_full(_desk(fock_dims=(10, 10), fock_budget=4096))),
    }

import time
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_START = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in test_acceptance.RESULTS:
        terminalreporter.write_line(line)
    elapsed = time.perf_counter() - _START
    verdict = "PASS" if elapsed < 60 else "FAIL"
    terminalreporter.write_line(f"[{verdict}] whole suite under 60 s: {elapsed:.1f} s")

"""Shared prime tables."""

import hypothesis
import pytest

from multcoinc.primes import build_prime_table

hypothesis.settings.register_profile("default", deadline=None, max_examples=60)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def table_small():
    return build_prime_table(10**5 + 10)


@pytest.fixture(scope="session")
def table_mid():
    return build_prime_table(10**6 + 10)


@pytest.fixture(scope="session")
def table_big():
    return build_prime_table(10**7 + 100)


@pytest.fixture(scope="session")
def acceptance_lines(request):
    lines = getattr(request.config, "_acceptance_lines", None)
    if lines is None:
        lines = request.config._acceptance_lines = {}
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])

import pytest
from hypothesis import HealthCheck, settings

from ellat.oracle import enumerate_universe
from ellat.syntax import parse_signature

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

_RESULTS = "_ellat_criteria"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion this test checks")
    setattr(config, _RESULTS, {})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    results = getattr(item.config, _RESULTS)
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        prev = results.get(num, (title, True))[1]
        results[num] = (title, prev and rep.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, _RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        title, ok = results[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def u_ab_r_2():
    """Every class of role depth at most 2 over names A, B and role r."""
    return enumerate_universe(parse_signature("names=A,B;roles=r"), 2)


@pytest.fixture(scope="session")
def u_ab_r_1():
    return enumerate_universe(parse_signature("names=A,B;roles=r"), 1)


@pytest.fixture(scope="session")
def u_a_r_2():
    return enumerate_universe(parse_signature("names=A;roles=r"), 2)

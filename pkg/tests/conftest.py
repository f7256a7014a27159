import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).resolve().parent))

from htva import brst, hypertoric as ht  # noqa: E402

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

EX1 = ([[1, 1]], [1])
EX2 = ([[1, 0, 1], [0, 1, 1]], [2, 1])


@pytest.fixture(scope="session")
def inp1():
    return ht.HypertoricInput.create(*EX1)


@pytest.fixture(scope="session")
def inp2():
    return ht.HypertoricInput.create(*EX2)


@pytest.fixture(scope="session")
def ctx1(inp1):
    return brst.make_context(inp1)


@pytest.fixture(scope="session")
def ctx2(inp2):
    return brst.make_context(inp2)


@pytest.fixture(scope="session", params=["ex1", "ex2"])
def ctx(request, ctx1, ctx2):
    return ctx1 if request.param == "ex1" else ctx2


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, detail = RESULTS[k]
        terminalreporter.write_line(f"CRITERION {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

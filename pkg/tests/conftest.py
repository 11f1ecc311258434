import functools
import sys

import pytest
from hypothesis import HealthCheck, settings

from soergel.bimod import Setting
from soergel.fgl import make_fgl

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

BACKENDS = ("additive", "multiplicative", "log:2")


@functools.lru_cache(maxsize=None)
def law(spec, N, coeff="Z"):
    return make_fgl(spec, N, coeff)


@functools.lru_cache(maxsize=None)
def setting(spec, n, N):
    return Setting(law(spec, N), n)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def S2(backend):
    return setting(backend, 2, 6)


@pytest.fixture
def S3(backend):
    return setting(backend, 3, 6)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

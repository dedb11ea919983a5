import math

import pytest

from fplane_gerstner import FlowConfig
from fplane_gerstner.surface import adverse_limit


def make_config(lat_deg, k, c0=0.0, branch="east", **kw):
    return FlowConfig.from_latitude(math.radians(lat_deg), k, c0, branch, **kw)


def adverse_config(lat_deg=45.0, k=0.01, fraction=0.5, branch="east"):
    """Adverse current at ``fraction`` of the largest admissible magnitude."""
    base = make_config(lat_deg, k, 0.0, branch)
    # c depends weakly on c0; one fixed-point pass settles it far below 1e-6 relative
    c0 = fraction * adverse_limit(base)
    c0 = fraction * adverse_limit(make_config(lat_deg, k, c0, branch))
    return make_config(lat_deg, k, c0, branch)


# the four configurations used by the Euler and incompressibility criteria
CRITERION_CONFIGS = {
    "equator": lambda: make_config(0.0, 0.01, 0.0),
    "45N": lambda: make_config(45.0, 0.01, 0.0),
    "30S-following": lambda: make_config(-30.0, 0.05, -0.1),
    "45N-adverse": lambda: adverse_config(45.0, 0.01, 0.5),
}


@pytest.fixture(params=sorted(CRITERION_CONFIGS))
def criterion_config(request):
    return CRITERION_CONFIGS[request.param]()


@pytest.fixture
def cfg45():
    return make_config(45.0, 0.01, 0.0)


@pytest.fixture
def cfg_equator():
    return make_config(0.0, 0.01, 0.0)


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record and print a one-line pass/fail verdict for an acceptance criterion."""
    lines = request.config.stash[_VERDICTS]

    def record(number, text, ok):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {text}"
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from fixedenergy.experiment import ExperimentFixture
from fixedenergy.scattering import PiecewiseConstantPotential, kappa_from_potential

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number, name, passed, detail=""):
        line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


@pytest.fixture(scope="session")
def fixture():
    return ExperimentFixture()


@pytest.fixture(scope="session")
def q_orig_pot(fixture):
    return fixture.original_potential()


@pytest.fixture(scope="session")
def kv_orig(fixture, q_orig_pot):
    return kappa_from_potential(q_orig_pot, fixture.k)


@pytest.fixture
def zero_pot():
    return PiecewiseConstantPotential([0.5, 1.0, 1.5], np.zeros(3))

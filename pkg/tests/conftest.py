import time

import numpy as np
import pytest

from curved_nbody.continuation import continue_family
from curved_nbody.seeds import lagrange_seed

ACCEPTANCE_LINES = []
# wall-clock seconds spent building each cached family
BUILD_SECONDS = {}


def sample_configuration(rng, n, kappa, min_sep=0.1):
    """Random admissible configuration: inside a disk safely within the chart, no near collisions."""
    radius = 0.9 if kappa >= 0 else 0.9 * min(1.0, 1.0 / np.sqrt(-kappa))
    while True:
        r = radius * np.sqrt(rng.uniform(0, 1, n))
        t = rng.uniform(0, 2 * np.pi, n)
        p = np.column_stack((r * np.cos(t), r * np.sin(t)))
        d = np.linalg.norm(p[:, None] - p[None], axis=-1) + np.eye(n)
        if d.min() > min_sep:
            return p.ravel()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def equal_seed():
    return lagrange_seed(1, 1, 1)


@pytest.fixture(scope="session")
def seed123():
    return lagrange_seed(1, 2, 3)


@pytest.fixture(scope="session")
def equal_pos(equal_seed):
    return continue_family(equal_seed, "+", kappa_limit=1.0)


@pytest.fixture(scope="session")
def equal_neg(equal_seed):
    t0 = time.perf_counter()
    fam = continue_family(equal_seed, "-", kappa_limit=-70.0, adaptive=False)
    BUILD_SECONDS["equal_neg"] = time.perf_counter() - t0
    return fam


@pytest.fixture(scope="session")
def pos123(seed123):
    return continue_family(seed123, "+", kappa_limit=1.0)


@pytest.fixture(scope="session")
def neg123(seed123):
    return continue_family(seed123, "-", kappa_limit=-18.0, adaptive=False)


@pytest.fixture(scope="session")
def report_criterion():
    def report(number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name} -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

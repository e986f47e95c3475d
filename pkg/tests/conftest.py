import random
from fractions import Fraction

import pytest

from carnotcert import _pykernels

try:
    from carnotcert import _ckernels
except ImportError:
    _ckernels = None

KERNELS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    KERNELS.append(pytest.param(_ckernels, id="cython"))


def rand_rat(rng, bound=9, maxden=5):
    return Fraction(rng.randint(-bound, bound), rng.randint(1, maxden))


def rand_vec(rng, n, **kw):
    return tuple(rand_rat(rng, **kw) for _ in range(n))


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import random

import pytest

from blindtm import group

# Deterministic session-wide parameter sets.  The toy 23/11 group is small
# enough to brute force by hand; the 16-bit group exercises the generator's
# smallest path; 80-bit has a subgroup order above 2^64.
TOY = group.GroupParams(p=23, q=11, g=2, h=13)


def _make(bits, seed):
    return group.generate_params(bits, random.Random(seed))


@pytest.fixture(scope="session")
def params_tiny():
    return _make(16, 1001)


@pytest.fixture(scope="session")
def params64():
    return _make(64, 1002)


@pytest.fixture(scope="session")
def params80():
    return _make(80, 1003)


@pytest.fixture(scope="session")
def params256():
    return _make(256, 1004)


@pytest.fixture(scope="session")
def params512():
    return _make(512, 1005)


@pytest.fixture()
def toy_params():
    return TOY

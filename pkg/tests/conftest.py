"""
Shared fixtures for the SymMatch test suite.
"""
import random
import sys
from pathlib import Path

import pytest

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from core.bigraph import FiniteBigraph  # noqa: E402
from core.groups import Family, GroupDescriptor  # noqa: E402
from core.symmetry import SymGraph  # noqa: E402
from utils.logger import log  # noqa: E402


@pytest.fixture(autouse=True)
def quiet_logger():
    """Keep test output clean; tests that check logging raise the level themselves."""
    previous = log.level
    log.configure(level=0)
    yield
    log.level = previous


@pytest.fixture
def rng():
    return random.Random(2016)


@pytest.fixture
def k33():
    return FiniteBigraph.complete(3, 3)


@pytest.fixture
def k36():
    return FiniteBigraph.complete(3, 6)


@pytest.fixture
def z1():
    return GroupDescriptor(Family.ZD, 1)


@pytest.fixture
def z2():
    return GroupDescriptor(Family.ZD, 2)


@pytest.fixture
def f2():
    return GroupDescriptor(Family.FREE, 2)


@pytest.fixture
def trivial():
    return GroupDescriptor(Family.CYCLIC, 1)


@pytest.fixture
def z_example(z1):
    """One A-orbit, one B-orbit, triples (0, 0, 0) and (0, 1, 0): not proper."""
    return SymGraph(z1, 1, 1, ((0, z1.elem((0,)), 0), (0, z1.elem((1,)), 0)))

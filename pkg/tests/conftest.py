import sys
import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from afrkit.flex import FlexResource, ResourceSet
from afrkit.instances import random_resource, random_resource_set


def unit_resource(rid="A"):
    """T=1, p in [0,1], e(1) in [0,1]."""
    return FlexResource(rid, [0], [1], [0], [1])


def sink_resource(rid="B"):
    """T=1, p in [-1,0], e(1) in [-1,0]."""
    return FlexResource(rid, [-1], [0], [-1], [0])


def two_step_pair():
    a = FlexResource("A", [0, 0], [1, 1], [0, 0], [1, 2])
    b = FlexResource("B", [-1, -1], [1, 1], [-1, -1], [1, 1])
    return ResourceSet((a, b))


@st.composite
def valid_resources(draw, T=None, e0=True):
    T = draw(st.integers(1, 4)) if T is None else T
    seed = draw(st.integers(0, 2**32 - 1))
    return random_resource(random.Random(seed), T, "r", e0=e0)


@st.composite
def valid_fleets(draw, max_N=3, max_T=4, e0=True):
    N = draw(st.integers(1, max_N))
    T = draw(st.integers(1, max_T))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_resource_set(random.Random(seed), N, T, e0=e0)


@pytest.fixture
def pair():
    return two_step_pair()


@pytest.fixture
def rng():
    return random.Random(1234)


F = Fraction


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])

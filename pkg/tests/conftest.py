import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from canonoid import PhaseSpace, ScalarPoly, VectorField
from canonoid import randgen as rg

settings.register_profile(
    "repo", max_examples=40, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

S1 = PhaseSpace(1)
S2 = PhaseSpace(2)


@pytest.fixture
def s1():
    return S1


@pytest.fixture
def s2():
    return S2


def polys(space, max_degree=3):
    """Hypothesis strategy: sparse polynomials with small rational coefficients."""
    exps = st.tuples(*[st.integers(0, max_degree)] * space.dim).filter(lambda e: sum(e) <= max_degree)
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(exps, coeffs, max_size=5).map(lambda d: ScalarPoly(space, d))


def fields(space, max_degree=2):
    return st.lists(polys(space, max_degree), min_size=space.dim, max_size=space.dim).map(
        lambda cs: VectorField(space, cs)
    )


def seeded(seed):
    return random.Random(seed)


@pytest.fixture
def rng():
    return random.Random(12345)


__all__ = ["S1", "S2", "polys", "fields", "seeded", "rg"]

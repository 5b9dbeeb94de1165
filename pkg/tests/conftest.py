import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_rat = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@pytest.fixture
def rng():
    return random.Random(12345)


def frac_matrix(M):
    return [[Fraction(v) for v in r] for r in M]

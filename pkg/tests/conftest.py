import numpy as np
import pytest
from hypothesis import settings, strategies as st

from polymet.groups import FiniteWreathElement, LamplighterElement

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

lamp_maps = st.dictionaries(st.integers(-20, 20), st.integers(-20, 20), max_size=5)
lamplighter_elements = st.builds(LamplighterElement, lamp_maps, st.integers(-20, 20))


def finite_wreath_elements(m=2, n=3):
    return st.builds(
        lambda lamps, s: FiniteWreathElement(m, n, lamps, s),
        st.lists(st.integers(0, m - 1), min_size=n, max_size=n),
        st.integers(0, n - 1),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

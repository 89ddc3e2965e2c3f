from __future__ import annotations

import numpy as np
import pytest

from cdc.semigroup import decompose
from cdc.zoo import family, two_state


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def chain2():
    gen = two_state(1.0, 3.0)
    return gen, decompose(gen)


@pytest.fixture(scope="session")
def cycle8():
    gen = family("cycle", 8)
    return gen, decompose(gen)


@pytest.fixture(scope="session")
def path6():
    gen = family("path", 6)
    return gen, decompose(gen)

import random
from fractions import Fraction

import pytest

from braidvol.cluster import ClusterSeed, build_exchange_matrix


def rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 100), rng.randint(1, 100))


def rand_vector(rng: random.Random, n: int) -> tuple:
    return tuple(rand_fraction(rng) for _ in range(3 * n + 1))


def rand_seed(rng: random.Random, n: int) -> ClusterSeed:
    return ClusterSeed(rand_vector(rng, n), build_exchange_matrix(n))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)

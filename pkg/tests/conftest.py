import random

import pytest
from hypothesis import HealthCheck, settings

from cmtorus.exact_lattice import IntMatrix

settings.register_profile("cmtorus", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("cmtorus")


@pytest.fixture
def rng():
    return random.Random(20240601)


def random_unimodular(rng, n, steps=None):
    """Product of random elementary operations; determinant +-1."""
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            rows[i] = [-x for x in rows[i]]
        else:
            q = rng.randint(-3, 3)
            rows[i] = [a + q * b for a, b in zip(rows[i], rows[j])]
    return IntMatrix(rows, n, n)

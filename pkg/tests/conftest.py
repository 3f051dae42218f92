import numpy as np
import pytest

from strata import Subspace, is_direct_sum
from strata.instances import random_subspace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_split(rng, n, d):
    """A generic (not orthogonal) decomposition of R^n into dims d, n-d."""
    while True:
        e_star = random_subspace(rng, n, d)
        r = random_subspace(rng, n, n - d)
        if is_direct_sum([e_star, r]):
            return e_star, r


def span(*vectors):
    return Subspace.span(*vectors)

import random

import pytest

from coxdunkl.polynomials import MultiPoly
from coxdunkl.suite import group_context


@pytest.fixture(scope="session")
def ctx_a1():
    return group_context("A1")


@pytest.fixture(scope="session")
def ctx_a2():
    return group_context("A2")


@pytest.fixture(scope="session")
def ctx_b2():
    return group_context("B2")


def random_multipoly(rs, rng, max_degree=5, terms=4, homogeneous=False):
    """Small random integer-coefficient polynomial (deterministic rng)."""
    mapping = {}
    deg = rng.randint(0, max_degree)
    for _ in range(terms):
        if not homogeneous:
            deg = rng.randint(0, max_degree)
        exps = [0] * rs.rank
        left = deg
        for i in range(rs.rank - 1):
            exps[i] = rng.randint(0, left)
            left -= exps[i]
        exps[rs.rank - 1] = left
        key = tuple(exps)
        mapping[key] = mapping.get(key, 0) + rng.choice([-3, -2, -1, 1, 2, 3])
    mapping = {e: c for e, c in mapping.items() if c}
    if not mapping:
        mapping = {(0,) * rs.rank: 1}
    return MultiPoly.from_terms(rs, mapping)

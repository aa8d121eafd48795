"""Shared fixtures for the two built-in chains and their exact analyses.

Session scope keeps the expensive objects (hierarchies, entity sets)
computed once.  Tests that measure wall-clock time build fresh copies
instead of using these.
"""

from fractions import Fraction

import pytest

from locint import (
    EntitySet,
    Pattern,
    build_markov_chain,
    disintegration_hierarchy,
    entity_set_union,
    enumerate_trajectories,
    mc_const_spec,
    mc_eps_spec,
    node,
)

EPS = Fraction(1, 100)

# Representative trajectories of the noisy chain, one per probability
# class, as (value vector, exact probability).  Vector order is
# 1/0, 2/0, 1/1, 2/1, 1/2, 2/2.
REPRESENTATIVES = [
    ((0, 1, 0, 1, 0, 1), Fraction(9409, 40000)),
    ((0, 1, 0, 1, 0, 0), Fraction(97, 40000)),
    ((0, 1, 0, 0, 0, 1), Fraction(1, 40000)),
]

# Anchor patterns reused across the perception and action tests.
ANCHOR_A = {(2, 0): 1, (1, 1): 0, (1, 2): 0, (2, 2): 1}
ANCHOR_B = {(2, 0): 1, (1, 1): 1, (1, 2): 1, (2, 2): 1}
ANCHOR_C = {(2, 0): 1, (1, 1): 1, (2, 1): 1, (1, 2): 1, (2, 2): 1}


def pat(assignments):
    """Build a pattern from {(row, time): value}."""
    return Pattern({node(j, t): v for (j, t), v in assignments.items()})


def vector_pattern(net, values):
    return Pattern(dict(zip(net.node_ids, values)))


@pytest.fixture(scope="session")
def const_net():
    return build_markov_chain(mc_const_spec())


@pytest.fixture(scope="session")
def eps_net():
    return build_markov_chain(mc_eps_spec(EPS))


@pytest.fixture(scope="session")
def const_trajectories(const_net):
    return [x for x, p in enumerate_trajectories(const_net) if p > 0]


@pytest.fixture(scope="session")
def eps_trajectories(eps_net):
    return list(enumerate_trajectories(eps_net))


@pytest.fixture(scope="session")
def const_hierarchies(const_net, const_trajectories):
    return [disintegration_hierarchy(const_net, x) for x in const_trajectories]


@pytest.fixture(scope="session")
def eps_entity_union(eps_net):
    return entity_set_union(eps_net)


@pytest.fixture(scope="session")
def eps_entity_set(eps_net):
    return EntitySet.iota(eps_net)

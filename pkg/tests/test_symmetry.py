"""Permutation symmetries: group actions, invariance laws, propagation."""

import functools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EPS, pat
from locint import (
    GeneratedGroup,
    LocintError,
    MarkovSpec,
    Permutation,
    SetPartition,
    act_on_distribution,
    act_on_partition,
    act_on_pattern,
    check_markov_symmetry_propagation,
    check_sli_symmetry,
    enumerate_partitions,
    is_symmetry,
    mc_const_spec,
    mc_const_symmetry_group,
    mc_eps_spec,
    node,
    orbit,
    row_time_permutation,
    sli,
    spatial_flip,
    spatial_permutation,
    time_shift,
)


@pytest.fixture(scope="module")
def const_group(const_net):
    return mc_const_symmetry_group(const_net)


def test_group_order(const_group):
    # 6 within-row time permutations per row, times the row swap
    assert len(const_group.elements()) == 72


def test_group_elements_are_symmetries(const_net, const_group):
    for g in const_group.elements():
        assert is_symmetry(g, const_net)


def test_trajectory_orbits(const_net, const_trajectories, const_group):
    sizes = sorted(len(orbit(const_group, x)) for x in const_trajectories)
    assert sizes == [1, 1, 2, 2]
    reached = set()
    for x in const_trajectories:
        reached.update(orbit(const_group, x))
    assert reached == set(const_trajectories)


def test_flip_is_symmetry_of_both_chains(const_net, eps_net):
    assert is_symmetry(spatial_flip(const_net), const_net)
    assert is_symmetry(spatial_flip(eps_net), eps_net)


def test_time_shift_breaks_noisy_chain(const_net, eps_net):
    assert is_symmetry(time_shift(const_net, 1), const_net)
    assert not is_symmetry(time_shift(eps_net, 1), eps_net)


def test_row_time_permutation_generates_symmetries(const_net):
    g = row_time_permutation(const_net, 1, {0: 1, 1: 0, 2: 2})
    assert is_symmetry(g, const_net)
    assert g(node(1, 0)) == node(1, 1)
    assert g(node(2, 0)) == node(2, 0)


def test_permutation_algebra(const_net):
    g = spatial_flip(const_net)
    h = row_time_permutation(const_net, 1, {0: 1, 1: 0, 2: 2})
    assert (g * g).is_identity
    assert (g * h).inverse() == h.inverse() * g.inverse()
    assert Permutation.from_cycles(g.to_cycles()) == g


def test_cycle_round_trip(const_net):
    g = row_time_permutation(const_net, 2, {0: 1, 1: 2, 2: 0})
    cycles = g.to_cycles()
    assert Permutation.from_cycles(cycles) == g
    assert sorted(q.label for q in g.support) == ["2/0", "2/1", "2/2"]


def test_action_on_pattern_and_partition(const_net, const_trajectories):
    g = spatial_flip(const_net)
    x = pat({(1, 0): 0, (2, 1): 1})
    assert act_on_pattern(g, x) == pat({(2, 0): 0, (1, 1): 1})
    ground = sorted(x.domain)
    pi = SetPartition.zero(ground)
    acted = act_on_partition(g, pi)
    assert len(acted.blocks) == 2
    assert set(acted.ground) == {node(2, 0), node(1, 1)}


@functools.lru_cache(maxsize=1)
def _law_setup():
    from locint import build_markov_chain
    net = build_markov_chain(mc_const_spec())
    group = mc_const_symmetry_group(net)
    return net, group.elements()


@settings(max_examples=200)
@given(st.data())
def test_action_laws(data):
    # identity, compatibility, and inverse cancellation on random
    # patterns under random group elements
    net, elements = _law_setup()
    g = data.draw(st.sampled_from(elements))
    h = data.draw(st.sampled_from(elements))
    ids = list(net.node_ids)
    chosen = data.draw(st.permutations(ids))[:data.draw(st.integers(1, 6))]
    x = pat({(q.space, q.time): data.draw(st.integers(0, 1))
             for q in chosen})
    identity = g * g.inverse()
    assert act_on_pattern(identity, x) == x
    assert act_on_pattern(g, act_on_pattern(h, x)) == \
        act_on_pattern(g * h, x)
    assert act_on_pattern(g.inverse(), act_on_pattern(g, x)) == x
    pi = SetPartition.from_rgs(
        sorted(x.domain),
        tuple(data.draw(st.integers(0, 1)) if i else 0
              for i in range(len(x.domain))))
    assert act_on_partition(g, act_on_partition(h, pi)) == \
        act_on_partition(g * h, pi)


def test_invariance_law_on_samples(const_net, const_trajectories,
                                   const_group):
    rng = random.Random(11)
    elements = const_group.elements()
    parts = list(enumerate_partitions(const_net.node_ids))
    for _ in range(50):
        g = rng.choice(elements)
        x = rng.choice(const_trajectories)
        pi = rng.choice(parts)
        assert sli(const_net, act_on_pattern(g, x),
                   act_on_partition(g, pi)).ratio == \
            sli(const_net, x, pi).ratio


def test_full_invariance_report(const_net, const_trajectories, const_group):
    report = check_sli_symmetry(const_net, const_group,
                                const_trajectories[0])
    assert report["passed"]
    assert report["group_size"] == 72
    assert report["checked"] == 72 * 203
    assert report["violations"] == []
    assert report["precondition_failures"] == []
    assert sum(report["case_counts"].values()) == report["checked"]


def test_invariance_report_on_sub_pattern(const_net, const_trajectories,
                                          const_group):
    x = const_trajectories[0]
    p = x.restrict([node(1, 0), node(1, 1), node(2, 0)])
    report = check_sli_symmetry(const_net, const_group, p)
    assert report["passed"]
    assert report["checked"] > 0


def test_distribution_view_matches_net(const_net, const_trajectories):
    g = spatial_flip(const_net)
    view = act_on_distribution(g, const_net)
    for x in const_trajectories:
        assert view.joint_probability(x) == \
            const_net.joint_probability(act_on_pattern(g.inverse(), x))
        assert view.marginal_probability(x.time_slice(0)) == \
            const_net.marginal_probability(
                act_on_pattern(g.inverse(), x.time_slice(0)))


def test_matrix_symmetry_propagates():
    flip = Permutation.from_cycles([(1, 2)])
    assert check_markov_symmetry_propagation(
        mc_const_spec(), GeneratedGroup([flip]))
    assert check_markov_symmetry_propagation(
        mc_eps_spec(EPS), GeneratedGroup([flip]))


def test_matrix_asymmetry_is_reported():
    # both rows copy row one, so swapping the rows changes the law
    states = ((0, 1), (0, 1))
    rows = []
    for nxt in range(4):
        row = []
        for prev in range(4):
            prev1 = prev >> 1
            row.append(Fraction(int(nxt == (prev1 << 1 | prev1))))
        rows.append(tuple(row))
    spec = MarkovSpec(states, 3, tuple(rows), (Fraction(1, 4),) * 4)
    flip = Permutation.from_cycles([(1, 2)])
    assert not check_markov_symmetry_propagation(
        spec, GeneratedGroup([flip]))


def test_row_permutation_guards():
    flip = Permutation.from_cycles([(1, 3)])
    with pytest.raises(LocintError, match="unknown spatial row"):
        check_markov_symmetry_propagation(
            mc_const_spec(), GeneratedGroup([flip]))


def test_spatial_permutation_requires_same_spaces(const_net):
    g = spatial_permutation(const_net, {1: 2, 2: 1})
    assert is_symmetry(g, const_net)

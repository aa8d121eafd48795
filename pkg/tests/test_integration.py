"""Local integration: exact ratios, bounds, minima over partitions."""

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
import strategies
from conftest import EPS, pat
from locint import (
    ImpossiblePattern,
    LocintError,
    Pattern,
    SetPartition,
    UndefinedCli,
    cli,
    delta_sli,
    enumerate_partitions,
    max_sli_fixture,
    negative_sli_fixture,
    node,
    normalized_sli,
    sli,
    sli_deterministic,
    sli_upper_bound,
)


def domain_partitions(pattern):
    return enumerate_partitions(sorted(pattern.domain))


def test_known_ratios_on_constant_chain(const_net, const_trajectories):
    x = const_trajectories[0]
    two = x.restrict([node(1, 0), node(1, 1)])
    split = SetPartition.zero(sorted(two.domain))
    v = sli(const_net, two, split)
    assert v.ratio == 2
    assert v.bits() == 1.0
    whole_rows = SetPartition.parse(
        "{1/0,2/0,1/1,2/1,1/2,2/2}", sorted(x.domain))
    assert sli(const_net, x, whole_rows).ratio == 1


def test_independent_blocks_give_ratio_one(const_net, const_trajectories):
    # the two rows of the constant chain are independent
    x = const_trajectories[0]
    rows = SetPartition.parse(
        "{1/0,1/1,1/2}|{2/0,2/1,2/2}", sorted(x.domain))
    v = sli(const_net, x, rows)
    assert v.ratio == 1
    assert v.bits() == 0.0


def test_impossible_pattern_is_rejected(const_net):
    impossible = pat({(1, 0): 0, (1, 1): 1})
    ground = sorted(impossible.domain)
    with pytest.raises(ImpossiblePattern, match="pattern impossible"):
        sli(const_net, impossible, SetPartition.zero(ground))


def test_partition_must_cover_domain(const_net, const_trajectories):
    x = const_trajectories[0]
    wrong = SetPartition.zero(sorted(x.domain)[:4])
    with pytest.raises(LocintError):
        sli(const_net, x, wrong)


def test_ratio_matches_matrix_reference_everywhere(eps_net):
    chain = oracles.mc_eps_chain(EPS)
    nodes = [node(1, 0), node(2, 0), node(2, 1), node(1, 2)]
    for values in itertools.product((0, 1), repeat=4):
        p = Pattern(dict(zip(nodes, values)))
        raw = {(q.space, q.time): v for q, v in p.items()}
        for part in domain_partitions(p):
            expected = oracles.sli_ratio(
                chain, raw, [[(q.space, q.time) for q in b]
                             for b in part.blocks])
            assert sli(eps_net, p, part).ratio == expected


def test_deterministic_route_agrees(const_net, const_trajectories):
    for x in const_trajectories:
        for sub_nodes in [list(x.domain)[:3], list(x.domain)]:
            p = x.restrict(sub_nodes)
            for part in domain_partitions(p):
                assert sli_deterministic(const_net, p, part).ratio == \
                    sli(const_net, p, part).ratio


def test_deterministic_route_rejects_noisy_net(eps_net, eps_trajectories):
    x = eps_trajectories[0][0]
    with pytest.raises(LocintError, match="non-deterministic"):
        sli_deterministic(eps_net, x, SetPartition.zero(sorted(x.domain)))


def test_upper_bound_and_equality_condition(eps_net, eps_trajectories):
    for x, p in eps_trajectories[:6]:
        sub = x.restrict([node(1, 0), node(1, 1), node(2, 1)])
        prob = eps_net.marginal_probability(sub)
        for part in domain_partitions(sub):
            if len(part.blocks) < 2:
                continue
            v = sli(eps_net, sub, part)
            bound = prob ** (1 - len(part.blocks))
            assert v.ratio <= bound
            assert v.bits() <= sli_upper_bound(prob, len(part.blocks)) + 1e-9
            block_probs = [
                eps_net.marginal_probability(sub.restrict(b))
                for b in part.blocks
            ]
            if all(bp == prob for bp in block_probs):
                assert v.ratio == bound
            else:
                assert v.ratio < bound


def test_max_fixture_attains_bound():
    q = Fraction(3, 7)
    net, p, part = max_sli_fixture(q, 4)
    v = sli(net, p, part)
    assert v.ratio == q ** (-3)
    assert v.bits() == pytest.approx(sli_upper_bound(q, 4))
    for b in part.blocks:
        assert net.marginal_probability(p.restrict(b)) == q


def test_negative_fixture_scores_below_one():
    dist, p, part = negative_sli_fixture(Fraction(1, 3), 3)
    v = sli(dist, p, part)
    assert v.ratio < 1
    assert v.bits() < 0


def test_fixture_validation():
    with pytest.raises(ValueError):
        max_sli_fixture(Fraction(1, 2), 1)
    with pytest.raises(ValueError):
        max_sli_fixture(Fraction(7, 2), 3)
    with pytest.raises(ValueError):
        negative_sli_fixture(Fraction(1, 2), 1)


def test_normalized_sli_exact_branch(const_net, const_trajectories):
    x = const_trajectories[0]
    value = normalized_sli(const_net, x, SetPartition.zero(sorted(x.domain)))
    assert value == Fraction(2, 5)
    assert isinstance(value, Fraction)


def test_normalized_sli_float_branch(eps_net, eps_trajectories):
    x = eps_trajectories[0][0]
    part = SetPartition.zero(sorted(x.domain))
    value = normalized_sli(eps_net, x, part)
    assert isinstance(value, float)
    v = sli(eps_net, x, part)
    prob = eps_net.marginal_probability(x)
    expected = v.bits() / (5 * math.log2(1 / prob))
    assert value == pytest.approx(expected, abs=1e-12)


def test_normalized_sli_rejects_unit_partition(const_net, const_trajectories):
    x = const_trajectories[0]
    with pytest.raises(LocintError):
        normalized_sli(const_net, x, SetPartition.unit(sorted(x.domain)))


def test_delta_sli_is_a_ratio_of_ratios(const_net, const_trajectories):
    x = const_trajectories[0]
    parts = list(domain_partitions(x))
    pi, xi = parts[5], parts[40]
    d = delta_sli(const_net, x, pi, xi)
    assert d.ratio == sli(const_net, x, pi).ratio / sli(const_net, x, xi).ratio


def test_minimum_search_and_witness(const_net, const_trajectories):
    x = const_trajectories[0]
    p = x.restrict([node(1, 0), node(1, 1)])
    result = cli(const_net, p)
    assert result.value.ratio == 2
    assert result.is_entity
    assert result.witness.rgs == (0, 1)
    # the unit partition never competes, so a fully integrated pair
    # scores above 1 even though the unit ratio would be 1
    assert result.witness != SetPartition.unit(sorted(p.domain))


def test_minimum_matches_reference(eps_net):
    chain = oracles.mc_eps_chain(EPS)
    samples = [
        {(1, 0): 0, (2, 0): 1, (1, 1): 0},
        {(1, 1): 0, (2, 1): 1, (1, 2): 0, (2, 2): 1},
        {(1, 0): 1, (1, 1): 1, (1, 2): 1},
    ]
    for raw in samples:
        got = cli(eps_net, pat(raw))
        assert got.value.ratio == oracles.min_nonunit_ratio(chain, raw)


def test_minimum_picks_first_witness_in_enumeration_order(eps_net):
    p = pat({(1, 0): 0, (2, 0): 1, (1, 1): 0})
    result = cli(eps_net, p)
    ground = sorted(p.domain)
    best = result.value.ratio
    for part in enumerate_partitions(ground):
        if part.is_unit:
            continue
        r = sli(eps_net, p, part).ratio
        assert r >= best
        if part == result.witness:
            break
        assert r > best


def test_single_node_domain_is_undefined(const_net):
    with pytest.raises(UndefinedCli):
        cli(const_net, pat({(1, 0): 0}))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_block_marginals_dominate_pattern(data):
    # every block of every partition is at least as probable as the
    # whole pattern, which makes the bound argument work
    net = data.draw(strategies.small_nets(max_nodes=5))
    p = data.draw(strategies.patterns_of(net, min_size=2))
    whole = net.marginal_probability(p)
    ground = sorted(p.domain)
    for part in enumerate_partitions(ground):
        for b in part.blocks:
            assert net.marginal_probability(p.restrict(b)) >= whole


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_bound_holds_on_random_nets(data):
    net = data.draw(strategies.small_nets(max_nodes=4))
    p = data.draw(strategies.patterns_of(net, min_size=2))
    whole = net.marginal_probability(p)
    if whole == 0:
        return
    for part in enumerate_partitions(sorted(p.domain)):
        if len(part.blocks) < 2:
            continue
        v = sli(net, p, part)
        assert v.ratio <= whole ** (1 - len(part.blocks))

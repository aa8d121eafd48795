"""Hypothesis strategies for random nets plus a naive joint reference.

The reference multiplies mechanism rows over complete assignments and
sums, with no caching and no factoring, so it exercises none of the
code paths used by the package's marginal engine.
"""

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from locint import BayesNet, Mechanism, NodeId, Pattern, StateSpace


@st.composite
def small_nets(draw, min_nodes=2, max_nodes=5, max_states=3,
               deterministic=False, uniform_roots=False):
    n = draw(st.integers(min_nodes, max_nodes))
    ids = [NodeId(f"n{i}") for i in range(n)]
    spaces = {}
    mechanisms = {}
    for i, name in enumerate(ids):
        size = draw(st.integers(2, max_states))
        spaces[name] = StateSpace(tuple(range(size)))
        parents = tuple(q for q in ids[:i] if draw(st.booleans()))
        parent_sizes = [len(spaces[q].symbols) for q in parents]
        table = {}
        for cfg in itertools.product(*(range(s) for s in parent_sizes)):
            if uniform_roots and not parents:
                row = tuple(Fraction(1, size) for _ in range(size))
            elif deterministic:
                hot = draw(st.integers(0, size - 1))
                row = tuple(Fraction(int(j == hot)) for j in range(size))
            else:
                weights = [draw(st.integers(0, 4)) for _ in range(size)]
                if not any(weights):
                    weights[draw(st.integers(0, size - 1))] = 1
                total = sum(weights)
                row = tuple(Fraction(w, total) for w in weights)
            table[cfg] = row
        if parents:
            mechanisms[name] = Mechanism(parents, table)
        else:
            mechanisms[name] = Mechanism.root(table[()])
    return BayesNet(spaces, mechanisms)


def full_joint(net):
    """{value tuple over net.node_ids: Fraction} by direct products."""
    ids = net.node_ids
    spaces = [net.state_space(q).symbols for q in ids]
    out = {}
    for values in itertools.product(*spaces):
        assignment = dict(zip(ids, values))
        p = Fraction(1)
        for q in ids:
            mech = net.mechanism(q)
            row = mech.row(tuple(assignment[r] for r in mech.parent_order))
            p *= row[net.state_space(q).symbols.index(assignment[q])]
            if p == 0:
                break
        if p:
            out[values] = p
    return out


def naive_marginal(net, pattern):
    ids = net.node_ids
    total = Fraction(0)
    for values, p in full_joint(net).items():
        assignment = dict(zip(ids, values))
        if all(assignment[q] == v for q, v in pattern.items()):
            total += p
    return total


@st.composite
def patterns_of(draw, net, min_size=1, max_size=None):
    ids = list(net.node_ids)
    limit = len(ids) if max_size is None else min(max_size, len(ids))
    size = draw(st.integers(min_size, limit))
    chosen = draw(st.permutations(ids))[:size]
    return Pattern({
        q: draw(st.sampled_from(net.state_space(q).symbols)) for q in chosen
    })

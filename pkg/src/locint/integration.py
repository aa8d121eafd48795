"""Specific and complete local integration of patterns.

The integration of a pattern with respect to a partition of its domain
is the log ratio between the pattern's probability and the product of
its block probabilities. All comparisons and groupings happen on the
exact rational ratio; bits exist only for display.
"""

import math
from fractions import Fraction
from functools import total_ordering

from .errors import ImpossiblePattern, LocintError, UndefinedCli
from .model import BayesNet, Mechanism, NodeId, StateSpace
from .partition import SetPartition, enumerate_partitions
from .pattern import Pattern


@total_ordering
class SliValue:
    """An integration score held as the exact ratio p_O / prod_b p_b."""

    __slots__ = ("ratio",)

    def __init__(self, ratio):
        ratio = Fraction(ratio)
        if ratio <= 0:
            raise ValueError("integration ratio must be positive")
        self.ratio = ratio

    def bits(self):
        return math.log2(self.ratio.numerator) - math.log2(self.ratio.denominator)

    def __eq__(self, other):
        if isinstance(other, SliValue):
            return self.ratio == other.ratio
        return NotImplemented

    def __lt__(self, other):
        return self.ratio < other.ratio

    def __hash__(self):
        return hash(self.ratio)

    def __repr__(self):
        return f"SliValue({self.ratio}, {self.bits():g} bits)"


class CliResult:
    """Minimum integration over all non-unit partitions of a domain."""

    __slots__ = ("value", "witness", "is_entity")

    def __init__(self, value, witness):
        self.value = value
        self.witness = witness
        self.is_entity = value.ratio > 1

    def __repr__(self):
        flag = "entity" if self.is_entity else "not an entity"
        return f"CliResult({self.value!r}, witness={self.witness.render()}, {flag})"


def _check_partition(pattern, partition):
    if set(partition.ground) != pattern.domain:
        raise LocintError("partition does not partition the pattern's domain")


def sli(net, pattern, partition):
    """Integration of the pattern with respect to the partition.

    A pattern of probability 0 whose blocks are all impossible as well
    scores ratio 1 by the 0/0 convention; probability 0 with a possible
    block is an error.
    """
    _check_partition(pattern, partition)
    whole = net.marginal_probability(pattern)
    blocks = [net.marginal_probability(pattern.restrict(b)) for b in partition]
    if whole == 0:
        if any(p > 0 for p in blocks):
            raise ImpossiblePattern("pattern impossible")
        return SliValue(1)
    prod = Fraction(1)
    for p in blocks:
        prod *= p
    return SliValue(whole / prod)


def sli_deterministic(net, pattern, partition):
    """Same value as sli(), computed from trajectory counts on a
    deterministic net with uniform roots."""
    _check_partition(pattern, partition)
    n_whole = net.deterministic_pattern_count(pattern)
    n_blocks = [net.deterministic_pattern_count(pattern.restrict(b))
                for b in partition]
    if n_whole == 0:
        if any(c > 0 for c in n_blocks):
            raise ImpossiblePattern("pattern impossible")
        return SliValue(1)
    root_configs = 1
    for n in net.roots():
        root_configs *= len(net.state_space(n))
    num = n_whole * root_configs ** (len(partition) - 1)
    den = 1
    for c in n_blocks:
        den *= c
    return SliValue(Fraction(num, den))


def cli(net, pattern, cap=None):
    """Complete local integration: the exact minimum of sli over every
    non-unit partition, with the first witness in enumeration order."""
    if len(pattern) < 2:
        raise UndefinedCli("complete local integration needs at least two nodes")
    if net.marginal_probability(pattern) == 0:
        raise ImpossiblePattern("pattern impossible")
    best = None
    witness = None
    for partition in enumerate_partitions(pattern.domain, cap=cap):
        if len(partition) == 1:
            continue
        value = sli(net, pattern, partition)
        if best is None or value.ratio < best.ratio:
            best = value
            witness = partition
    return CliResult(best, witness)


def sli_upper_bound(pattern_prob, k):
    """The tight bound -(k-1) log2 p_O in bits."""
    p = Fraction(pattern_prob)
    if not 0 < p <= 1:
        raise ValueError("pattern probability must lie in (0,1]")
    if k < 1:
        raise ValueError("a partition has at least one block")
    return -(k - 1) * (math.log2(p.numerator) - math.log2(p.denominator))


def _factor_exponents(fraction):
    from sympy import factorint

    out = {}
    for p, e in factorint(fraction.numerator).items():
        out[p] = out.get(p, 0) + e
    for p, e in factorint(fraction.denominator).items():
        out[p] = out.get(p, 0) - e
    return {p: e for p, e in out.items() if e}


def normalized_sli(net, pattern, partition):
    """Integration divided by its upper bound, in [?,1].

    Returns an exact Fraction whenever the ratio is certifiably a
    rational power of 1/p_O (checked by prime factorization), otherwise
    a float. The value 1 is attained exactly when every block marginal
    equals the pattern marginal.
    """
    _check_partition(pattern, partition)
    if len(partition) < 2:
        raise LocintError("normalized integration needs a non-unit partition")
    whole = net.marginal_probability(pattern)
    if whole == 0 or whole == 1:
        raise LocintError("normalization undefined for pattern probability 0 or 1")
    ratio = sli(net, pattern, partition).ratio
    k = len(partition)
    if ratio == 1:
        return Fraction(0)
    base = 1 / whole
    re = _factor_exponents(ratio)
    be = _factor_exponents(base)
    if set(re) == set(be):
        lam = None
        ok = True
        for p, e in re.items():
            cand = Fraction(e, be[p])
            if lam is None:
                lam = cand
            elif cand != lam:
                ok = False
                break
        if ok:
            return lam / (k - 1)
    num = math.log2(ratio.numerator) - math.log2(ratio.denominator)
    den = (k - 1) * (math.log2(base.numerator) - math.log2(base.denominator))
    return num / den


def delta_sli(net, pattern, pi, xi):
    """Difference of integrations, as the exact ratio of the two SLI
    ratios; bits may be negative."""
    a = sli(net, pattern, pi)
    b = sli(net, pattern, xi)
    return SliValue(a.ratio / b.ratio)


def max_sli_fixture(q, n):
    """A root of probability q copied by n-1 child nodes; the full-domain
    pattern against singletons attains the upper bound -(n-1) log2 q."""
    q = Fraction(q)
    if not 0 < q < 1:
        raise ValueError("q must lie strictly between 0 and 1")
    if n < 2:
        raise ValueError("need at least two nodes")
    root = NodeId("v0")
    space = StateSpace((0, 1))
    nodes = {root: space}
    mechanisms = {root: Mechanism.root((q, 1 - q))}
    for i in range(1, n):
        child = NodeId(f"v{i}")
        nodes[child] = space
        mechanisms[child] = Mechanism((root,), {(0,): (1, 0), (1,): (0, 1)})
    net = BayesNet(nodes, mechanisms)
    pattern = Pattern({m: 0 for m in nodes})
    return net, pattern, SetPartition.zero(nodes)


class JointTable:
    """A bare joint distribution exposing the marginal interface that
    sli() needs, for fixtures that are not Bayesian networks."""

    def __init__(self, nodes, rows):
        self.node_ids = tuple(nodes)
        self.table = {Pattern(cfg): Fraction(p) for cfg, p in rows}
        if sum(self.table.values()) != 1:
            raise ValueError("joint table does not sum to 1")

    def marginal_probability(self, pattern):
        pattern = pattern if isinstance(pattern, Pattern) else Pattern(pattern)
        total = Fraction(0)
        for full, p in self.table.items():
            if all(full[n] == v for n, v in pattern.items()):
                total += p
        return total


def negative_sli_fixture(q, k):
    """A joint table over k binary nodes whose all-zeros pattern scores
    log2( q / (1-(1-q)/k)^k ) < 0 against singletons: mass q sits on
    the zero configuration and the rest spreads evenly over the k
    one-hot configurations."""
    q = Fraction(q)
    if not 0 < q < 1:
        raise ValueError("q must lie strictly between 0 and 1")
    if k < 2:
        raise ValueError("need at least two blocks")
    nodes = [NodeId(f"v{i}") for i in range(k)]
    zero = {n: 0 for n in nodes}
    rows = [(dict(zero), q)]
    for n in nodes:
        cfg = dict(zero)
        cfg[n] = 1
        rows.append((cfg, (1 - q) / k))
    dist = JointTable(nodes, rows)
    return dist, Pattern(zero), SetPartition.zero(nodes)

"""Permutation actions on patterns, partitions and distributions, and
the exact symmetry checks built on them.

The action on a pattern relabels nodes and keeps values, so the value
at node i after acting by g is the value the pattern had at g^{-1}(i).
Every internal caller routes through act_on_pattern; nothing else is
allowed to apply a node mapping to a pattern.
"""

from itertools import product

from .errors import CapExceeded, LocintError
from .model import build_markov_chain, node
from .partition import SetPartition, enumerate_partitions
from .pattern import Pattern
from .integration import sli

GROUP_CAP = 10 ** 4


class Permutation:
    """A bijection on a finite node subset, identity everywhere else."""

    __slots__ = ("_map",)

    def __init__(self, mapping):
        mapping = {k: v for k, v in dict(mapping).items() if k != v}
        if set(mapping) != set(mapping.values()):
            raise ValueError("mapping is not a bijection on its support")
        self._map = mapping

    def __call__(self, x):
        return self._map.get(x, x)

    @property
    def support(self):
        return frozenset(self._map)

    @property
    def is_identity(self):
        return not self._map

    def inverse(self):
        return Permutation({v: k for k, v in self._map.items()})

    def __mul__(self, other):
        """Composition: (g * h)(x) = g(h(x))."""
        keys = set(self._map) | set(other._map)
        return Permutation({k: self(other(k)) for k in keys})

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    @classmethod
    def from_cycles(cls, cycles):
        mapping = {}
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if a in mapping:
                    raise ValueError(f"element {a!r} appears in two cycles")
                mapping[a] = b
        return cls(mapping)

    def to_cycles(self):
        seen = set()
        cycles = []
        for start in sorted(self._map, key=str):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cycle.append(x)
                seen.add(x)
                x = self(x)
            cycles.append(tuple(cycle))
        return cycles

    def __repr__(self):
        if self.is_identity:
            return "Permutation(identity)"
        body = "".join("(" + " ".join(str(x) for x in c) + ")"
                       for c in self.to_cycles())
        return f"Permutation{body}"


class GeneratedGroup:
    """Closure of a generator list under composition, capped.

    Elements come out in breadth-first order starting at the identity,
    which makes every downstream report deterministic.
    """

    def __init__(self, generators, cap=GROUP_CAP):
        self.generators = tuple(generators)
        identity = Permutation({})
        elements = [identity]
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for g in frontier:
                for gen in self.generators:
                    h = gen * g
                    if h not in seen:
                        if len(seen) >= cap:
                            raise CapExceeded("group closure", len(seen) + 1, cap)
                        seen.add(h)
                        elements.append(h)
                        nxt.append(h)
            frontier = nxt
        self._elements = tuple(elements)

    def elements(self):
        return self._elements

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)


def act_on_pattern(g, pattern, net=None):
    """g x: the pattern on the relabeled domain carrying the old values,
    so the node g(n) receives the value of n."""
    if net is not None:
        for n in pattern.nodes:
            if net.state_space(g(n)) != net.state_space(n):
                raise LocintError(
                    f"nodes {n} and {g(n)} have different state spaces")
    return Pattern({g(n): v for n, v in pattern.items()})


def act_on_partition(g, partition):
    return SetPartition([[g(x) for x in b] for b in partition.blocks])


class DistributionView:
    """The image of a net's distribution under a permutation, queryable
    through the same marginal interface as the net itself."""

    def __init__(self, g, net):
        self.g = g
        self.net = net
        self._g_inv = g.inverse()

    def marginal_probability(self, pattern):
        pattern = pattern if isinstance(pattern, Pattern) else Pattern(pattern)
        return self.net.marginal_probability(act_on_pattern(self._g_inv, pattern))

    def joint_probability(self, trajectory):
        trajectory = trajectory if isinstance(trajectory, Pattern) else Pattern(trajectory)
        return self.net.joint_probability(act_on_pattern(self._g_inv, trajectory))


def act_on_distribution(g, net):
    return DistributionView(g, net)


def _full_assignments(net):
    order = net.topo_order
    for combo in product(*(net.state_space(n).symbols for n in order)):
        yield Pattern(dict(zip(order, combo)))


def is_symmetry(g, subject, net=None):
    """Exact test of acted-equals-original for a pattern, a partition,
    or a distribution (a net, checked over every full assignment)."""
    if isinstance(subject, Pattern):
        return act_on_pattern(g, subject, net=net) == subject
    if isinstance(subject, SetPartition):
        return act_on_partition(g, subject) == subject
    view = DistributionView(g, subject)
    for x in _full_assignments(subject):
        if view.joint_probability(x) != subject.joint_probability(x):
            return False
    return True


def orbit(group, subject):
    """All images of a partition or pattern under the group, in first
    encounter order."""
    out = []
    seen = set()
    for g in group:
        if isinstance(subject, SetPartition):
            image = act_on_partition(g, subject)
        else:
            image = act_on_pattern(g, subject)
        if image not in seen:
            seen.add(image)
            out.append(image)
    return out


def _pattern_marginal_invariant(net, g, pattern):
    """Whether g preserves the marginal over the pattern's domain:
    p_A(x^g) = p_A(x) for every assignment x of A."""
    domain = sorted(pattern.domain)
    g_inv = g.inverse()
    for combo in product(*(net.state_space(n).symbols for n in domain)):
        x = Pattern(dict(zip(domain, combo)))
        if net.marginal_probability(act_on_pattern(g_inv, x)) != \
                net.marginal_probability(x):
            return False
    return True


def check_sli_symmetry(net, group, pattern, partitions=None):
    """Verify the transformation law of integration under each group
    element and classify why the untransformed value survives.

    For every g that fixes the domain setwise and preserves its marginal,
    and every partition p, the integration of the acted pattern with
    respect to p must equal that of the original with respect to the
    acted partition. Elements failing the precondition are reported and
    skipped, never asserted.
    """
    domain = pattern.domain
    if partitions is None:
        partitions = list(enumerate_partitions(domain))
    report = {
        "group_size": len(group.elements()) if hasattr(group, "elements") else len(list(group)),
        "pattern": pattern.render(),
        "precondition_failures": [],
        "checked": 0,
        "violations": [],
        "case_counts": {"i": 0, "ii": 0, "iii": 0, "none": 0},
        "unchanged_sli": 0,
    }
    base_values = {p: sli(net, pattern, p) for p in partitions}
    for g in group:
        if not g.support <= domain:
            report["precondition_failures"].append(
                {"element": repr(g), "reason": "support leaves the pattern domain"})
            continue
        if not _pattern_marginal_invariant(net, g, pattern):
            report["precondition_failures"].append(
                {"element": repr(g), "reason": "does not preserve the domain marginal"})
            continue
        acted_pattern = act_on_pattern(g.inverse(), pattern)
        for p in partitions:
            lhs = sli(net, pattern, act_on_partition(g, p))
            rhs = sli(net, acted_pattern, p)
            report["checked"] += 1
            if lhs != rhs:
                report["violations"].append({
                    "element": repr(g), "partition": p.render(),
                    "lhs": str(lhs.ratio), "rhs": str(rhs.ratio)})
                continue
            base = base_values[p]
            if acted_pattern == pattern:
                case = "i"
            else:
                blocks_equal = all(
                    net.marginal_probability(acted_pattern.restrict(b)) ==
                    net.marginal_probability(pattern.restrict(b))
                    for b in p.blocks)
                if blocks_equal:
                    case = "ii"
                else:
                    prod_a = prod_b = 1
                    for b in p.blocks:
                        prod_a *= net.marginal_probability(acted_pattern.restrict(b))
                        prod_b *= net.marginal_probability(pattern.restrict(b))
                    case = "iii" if prod_a == prod_b else "none"
            report["case_counts"][case] += 1
            if lhs == base:
                report["unchanged_sli"] += 1
            elif case in ("i", "ii", "iii"):
                report["violations"].append({
                    "element": repr(g), "partition": p.render(),
                    "reason": f"corollary case {case} but value moved"})
    report["passed"] = not report["violations"]
    return report


def _act_config(g, cfg, rows):
    """Relabel the row coordinates of a joint slice configuration, so
    row g(j) receives the value row j had."""
    out = list(cfg)
    for i, j in enumerate(rows):
        out[rows.index(g(j))] = cfg[i]
    return tuple(out)


def check_markov_symmetry_propagation(spec, group):
    """True when the transition matrix commutes with every element of a
    spatial permutation group and the initial distribution is invariant;
    for driven specs the elements must fix the driving rows and the same
    matrix condition then expresses the driven factor condition.

    Whenever the check passes, invariance of the whole unrolled net is
    asserted exactly as a safety net before returning.
    """
    rows = list(range(1, spec.n_rows + 1))
    states = spec.joint_states()
    for g in group:
        for j in g.support:
            if j not in rows:
                raise LocintError(f"permutation moves unknown spatial row {j}")
            if j in spec.driving_rows:
                raise LocintError("permutation moves a driving row")
        for j in g.support:
            if spec.row_states[j - 1] != spec.row_states[g(j) - 1]:
                raise LocintError(
                    f"rows {j} and {g(j)} have different state spaces")
    for g in group:
        if g.is_identity:
            continue
        for cfg in states:
            if spec.initial[spec.state_index(_act_config(g, cfg, rows))] != \
                    spec.initial[spec.state_index(cfg)]:
                return False
        for prev in states:
            prev_idx = spec.state_index(prev)
            prev_acted = spec.state_index(_act_config(g, prev, rows))
            for cur in states:
                if spec.matrix[spec.state_index(_act_config(g, cur, rows))][prev_acted] != \
                        spec.matrix[spec.state_index(cur)][prev_idx]:
                    return False
    net = build_markov_chain(spec)
    for g in group:
        node_map = {}
        for t in range(spec.steps):
            for j in g.support:
                node_map[node(j, t)] = node(g(j), t)
        node_perm = Permutation(node_map)
        if not is_symmetry(node_perm, net):
            raise LocintError(
                "matrix symmetry did not propagate to the unrolled net")
    return True


def spatial_permutation(net, row_map):
    """Node permutation applying one spatial relabeling at every time."""
    mapping = {}
    for n in net.node_ids:
        if n.space in row_map:
            mapping[n] = net.find_node(row_map[n.space], n.time)
    return Permutation(mapping)


def spatial_flip(net):
    """Swap the two spatial rows of a 2-row chain at every time."""
    rows = net.spatial_indices()
    if len(rows) != 2:
        raise LocintError("spatial flip needs exactly two rows")
    return spatial_permutation(net, {rows[0]: rows[1], rows[1]: rows[0]})


def row_time_permutation(net, j, time_map):
    """Permute the times of one spatial row, all other nodes fixed."""
    mapping = {}
    for n in net.node_ids:
        if n.space == j and n.time in time_map:
            mapping[n] = net.find_node(j, time_map[n.time])
    return Permutation(mapping)


def time_shift(net, delta):
    """Cyclic global time shift by delta steps."""
    times = net.times()
    mapping = {}
    for n in net.node_ids:
        i = times.index(n.time)
        mapping[n] = net.find_node(n.space, times[(i + delta) % len(times)])
    return Permutation(mapping)


def mc_const_symmetry_group(net):
    """Per-row time permutations combined with the spatial flip; for the
    3-slice constant chain this closes at 72 elements."""
    times = net.times()
    rows = net.spatial_indices()
    generators = []
    for j in rows:
        for a, b in zip(times, times[1:]):
            generators.append(row_time_permutation(net, j, {a: b, b: a}))
    if len(rows) == 2:
        generators.append(spatial_flip(net))
    return GeneratedGroup(generators)

"""Entity sets, actions, and perceptions.

Entities are plain patterns gathered into an entity set. Actions live
on pairs of entities that share an environment at one time and differ
at the next. Perception machinery classifies the environments an
entity can face by the exact distribution they induce over its future
branches. The perception-action loop appears as the special entity set
of all agent-row sequences, where every construction collapses to its
classical form.
"""

import math
from fractions import Fraction
from itertools import product

from .errors import ImpossiblePattern, LocintError, PerceptionNotUnique
from .model import BayesNet, MarkovSpec, build_markov_chain, node
from .partition import SetPartition
from .pattern import Pattern, occurs_in


class EntitySet:
    """An ordered, deduplicated collection of entity patterns."""

    def __init__(self, patterns, source="explicit"):
        seen = {}
        for p in patterns:
            seen.setdefault(p, None)
        self.members = tuple(seen)
        self.source = source

    @classmethod
    def iota(cls, net, threads=1):
        from .disintegration import entity_set_union

        return cls([e.pattern for e in entity_set_union(net, threads=threads)],
                   source="iota")

    @classmethod
    def pa_loop(cls, loop):
        """Every agent-row sequence, including impossible ones."""
        nodes = [loop.m_node(t) for t in range(loop.steps)]
        symbols = loop.m_symbols
        return cls([Pattern(dict(zip(nodes, combo)))
                    for combo in product(symbols, repeat=len(nodes))],
                   source="pa_loop")

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, pattern):
        return pattern in set(self.members)


class CoActionPair:
    """An actor/co-actor witness that an action happens at a time."""

    __slots__ = ("actor", "actor_trajectory", "coactor", "coactor_trajectory",
                 "time", "kind")

    def __init__(self, actor, actor_trajectory, coactor, coactor_trajectory,
                 time, kind):
        self.actor = actor
        self.actor_trajectory = actor_trajectory
        self.coactor = coactor
        self.coactor_trajectory = coactor_trajectory
        self.time = time
        self.kind = kind

    def __repr__(self):
        return (f"CoActionPair(t={self.time}, {self.kind}, "
                f"coactor={self.coactor.render()})")


def _slice_nodes(pattern, t):
    return frozenset(n for n in pattern.nodes if n.time == t)


def environment_of(x_a, trajectory, t):
    """The time-t slice of the trajectory off the entity's nodes."""
    entity_nodes = _slice_nodes(x_a, t)
    return Pattern({n: v for n, v in trajectory.items()
                    if n.time == t and n not in entity_nodes})


def find_co_actions(net, entities, x_a, trajectory, t):
    """All co-action witnesses for the entity at time t in the given
    trajectory: entities in another possible trajectory that occupy the
    same nodes at t, see the identical environment at t, and differ at
    t+1, labeled value or extent by how the next slices differ."""
    if x_a not in entities:
        raise LocintError("pattern is not a member of the entity set")
    a_t = _slice_nodes(x_a, t)
    a_next = _slice_nodes(x_a, t + 1)
    if not a_t or not a_next:
        raise LocintError(f"entity has an empty slice at {t} or {t + 1}")
    if not occurs_in(x_a, trajectory):
        raise LocintError("entity does not occur in the trajectory")
    if net.joint_probability(trajectory) == 0:
        raise ImpossiblePattern("trajectory has probability 0")
    env = environment_of(x_a, trajectory, t)
    x_next = trajectory.restrict(a_next)
    possible = net.enumerate_trajectories()
    out = []
    for y_b in entities:
        b_t = _slice_nodes(y_b, t)
        b_next = _slice_nodes(y_b, t + 1)
        if not b_next or b_t != a_t:
            continue
        y_next = y_b.restrict(b_next)
        if y_next == x_next:
            continue
        kind = "value" if b_next == a_next else "extent"
        for y_v, _ in possible:
            if y_v == trajectory or not occurs_in(y_b, y_v):
                continue
            if environment_of(y_b, y_v, t) != env:
                continue
            out.append(CoActionPair(x_a, trajectory, y_b, y_v, t, kind))
    return out


class CoPerceptionContext:
    """The co-perception entities of an anchor at a time, with the
    mutual-exclusion facts and optional proxy needed for morphs."""

    def __init__(self, net, entities, anchor, t, r=1, zeta=None):
        if _slice_nodes(anchor, t) == frozenset() or \
                _slice_nodes(anchor, t + 1) == frozenset():
            raise LocintError(f"anchor has an empty slice at {t} or {t + 1}")
        if anchor not in entities:
            raise LocintError("anchor is not a member of the entity set")
        self.net = net
        self.anchor = anchor
        self.time = t
        self.r = r
        past = anchor.up_to(t)
        members = []
        for y in entities:
            if not _slice_nodes(y, t) or not _slice_nodes(y, t + 1):
                continue
            if y.up_to(t) == past:
                members.append(y)
        self.members = tuple(members)
        self.past = past
        self.flags = set_predicates(net, self.members)
        self.zeta = None
        if zeta is not None:
            self._adopt_zeta(list(zeta))

    def _adopt_zeta(self, zeta):
        if self.anchor not in zeta:
            raise LocintError("proxy set must contain the anchor")
        member_set = set(self.members)
        anchor_next = self.anchor.time_slice(self.time + 1)
        for y in zeta:
            if y not in member_set:
                raise LocintError(
                    f"proxy member {y.render()} is not a co-perception entity")
            if y == self.anchor:
                continue
            if y.time_slice(self.time + 1) == anchor_next:
                raise LocintError(
                    f"proxy member {y.render()} does not differ from the "
                    f"anchor at time {self.time + 1}")
            if _joint_probability_of_pair(self.net, self.anchor, y) != 0:
                raise LocintError(
                    f"proxy member {y.render()} can occur together with the anchor")
        bad = _interpenetrating_pair(self.net, zeta)
        if bad:
            raise LocintError(
                f"proxy set is not mutually exclusive: {bad[0].render()} / "
                f"{bad[1].render()}")
        self.zeta = tuple(zeta)

    @property
    def active_members(self):
        return self.zeta if self.zeta is not None else self.members


def _joint_probability_of_pair(net, x, y):
    if not x.agrees_with(y):
        return Fraction(0)
    return net.marginal_probability(x.merge(y))


def _interpenetrating_pair(net, patterns):
    patterns = list(patterns)
    for i, x in enumerate(patterns):
        for y in patterns[i + 1:]:
            if x != y and _joint_probability_of_pair(net, x, y) != 0:
                return x, y
    return None


def co_perception_entities(net, entities, anchor, t):
    return list(CoPerceptionContext(net, entities, anchor, t).members)


def set_predicates(net, patterns):
    """Exhaustiveness, pairwise mutual exclusion, and non-interpenetration
    of a collection of patterns, all checked exactly."""
    patterns = list(patterns)
    covered = Fraction(0)
    for trajectory, p in net.enumerate_trajectories():
        if any(occurs_in(x, trajectory) for x in patterns):
            covered += p
    exhaustive = covered == 1
    mutually_exclusive = _interpenetrating_pair(net, patterns) is None
    non_interpenetrating = True
    times = net.times() if net.has_coordinates else []
    for i, x in enumerate(patterns):
        if not non_interpenetrating:
            break
        for y in patterns[i + 1:]:
            if x == y:
                continue
            shared_past = any(x.up_to(t) == y.up_to(t) for t in times)
            if shared_past and _joint_probability_of_pair(net, x, y) != 0:
                non_interpenetrating = False
                break
    return {
        "exhaustive": exhaustive,
        "mutually_exclusive": mutually_exclusive,
        "non_interpenetrating": non_interpenetrating,
    }


def dist_over_mutually_exclusive(net, patterns, conditioning=None):
    """The renormalized distribution over a mutually exclusive family,
    optionally conditioned on a compatible pattern."""
    patterns = list(patterns)
    bad = _interpenetrating_pair(net, patterns)
    if bad:
        raise LocintError(
            f"set is not mutually exclusive: {bad[0].render()} / {bad[1].render()}")
    weights = []
    for x in patterns:
        if conditioning is None:
            weights.append(net.marginal_probability(x))
        elif x.agrees_with(conditioning):
            weights.append(net.marginal_probability(x.merge(conditioning)))
        else:
            weights.append(Fraction(0))
    total = sum(weights)
    if total == 0:
        raise ImpossiblePattern("conditioning is incompatible with every member")
    return {x: w / total for x, w in zip(patterns, weights)}


def co_perception_environments(net, context):
    """Every time-t environment that can occur together with at least
    one co-perception entity.

    When the member futures exhaust a common node set the membership
    test reduces to compatibility with the shared past alone; both
    routes give the same set and the fast one is used when detected.
    """
    t = context.time
    members = context.active_members
    anchor_nodes = _slice_nodes(context.anchor, t)
    env_nodes = [n for n in net.nodes_at_time(t) if n not in anchor_nodes]
    futures = [y.after(t) for y in members]
    domains = {f.domain for f in futures}
    fast = False
    if len(domains) == 1:
        domain = sorted(next(iter(domains)))
        seen = {tuple(f[n] for n in domain) for f in futures}
        fast = len(seen) == _space_size(net, domain)
    out = []
    for combo in product(*(net.state_space(n).symbols for n in env_nodes)):
        env = Pattern(dict(zip(env_nodes, combo)))
        if fast:
            keep = net.marginal_probability(context.past.merge(env)) > 0
        else:
            keep = any(_joint_probability_of_pair(net, y, env) > 0
                       for y in members)
        if keep:
            out.append(env)
    return out


def _space_size(net, nodes):
    size = 1
    for n in nodes:
        size *= len(net.state_space(n))
    return size


def branching_partition(context, r=None):
    """Group the active members by their next r time slices (node sets
    and values both count), in first-member order."""
    t = context.time
    r = context.r if r is None else r
    blocks = {}
    for y in context.active_members:
        key = Pattern({n: v for n, v in y.items() if t < n.time <= t + r})
        blocks.setdefault(key, []).append(y)
    return [(key, tuple(group)) for key, group in blocks.items()]


class BranchMorph:
    """The exact distribution over future branches given one
    co-perception environment."""

    __slots__ = ("environment", "branches")

    def __init__(self, environment, branches):
        self.environment = environment
        self.branches = tuple(branches)

    def distribution(self):
        return tuple(p for _, p, _ in self.branches)

    def __repr__(self):
        body = ", ".join(f"{key.render() or '()'}: {p}" for key, p, _ in self.branches)
        return f"BranchMorph({self.environment.render()} -> {body})"


def branch_morph(net, context, environment):
    """Branch distribution for one environment, per the renormalized
    sum of member-future probabilities given environment and past.

    Needs the active member set to be mutually exclusive: either the
    co-perception entities already are, or an explicit proxy subset was
    chosen when the context was built.
    """
    if context.zeta is None:
        bad = _interpenetrating_pair(net, context.members)
        if bad:
            raise PerceptionNotUnique(
                "perception not uniquely defined: co-perception entities "
                f"{bad[0].render()} and {bad[1].render()} can occur together; "
                "choose a mutually exclusive proxy subset")
    branches = branching_partition(context)
    base = context.past.merge(environment)
    weights = []
    for key, group in branches:
        w = Fraction(0)
        for y in group:
            w += net.marginal_probability(y.after(context.time).merge(base))
        weights.append(w)
    total = sum(weights)
    if total == 0:
        raise ImpossiblePattern(
            f"environment {environment.render()} is not a co-perception environment")
    return BranchMorph(environment,
                       [(key, w / total, group)
                        for (key, group), w in zip(branches, weights)])


class PerceptionPartition:
    """Environments grouped by exact branch-morph equality; each block
    is one perception."""

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        self.blocks = tuple(blocks)

    def __len__(self):
        return len(self.blocks)

    def environments(self):
        return [env for envs, _ in self.blocks for env in envs]


def perception_partition(net, context):
    groups = {}
    for env in co_perception_environments(net, context):
        morph = branch_morph(net, context, env)
        signature = morph.distribution()
        groups.setdefault(signature, []).append(env)
    return PerceptionPartition(
        [(tuple(envs), signature) for signature, envs in groups.items()])


class PaLoop:
    """A two-row chain with an agent row and an environment row, with
    no same-slice edges after the initial one."""

    def __init__(self, net, m_row, e_row):
        self.net = net
        self.m_row = m_row
        self.e_row = e_row
        self.steps = len(net.times())
        self.m_symbols = net.state_space(self.m_node(0)).symbols
        self.e_symbols = net.state_space(self.e_node(0)).symbols
        times = net.times()
        if times != list(range(len(times))):
            raise LocintError("loop times must be 0..T-1")
        for t in times:
            for n in (self.m_node(t), self.e_node(t)):
                for p in net.parents(n):
                    if t == 0:
                        if p.time != 0:
                            raise LocintError("initial slice parents must stay in slice 0")
                    elif p.time != t - 1:
                        raise LocintError(
                            f"{n} has parent {p} outside the previous slice")

    def m_node(self, t):
        return self.net.find_node(self.m_row, t)

    def e_node(self, t):
        return self.net.find_node(self.e_row, t)

    @classmethod
    def from_tables(cls, e_symbols, m_symbols, steps, initial, e_kernel, m_kernel):
        """Build from time-homogeneous kernels p(e'|e,m), p(m'|e,m) and
        an initial joint over (e,m), via the matrix form."""
        e_symbols = tuple(e_symbols)
        m_symbols = tuple(m_symbols)
        states = [(e, m) for e in e_symbols for m in m_symbols]
        matrix = []
        for e2, m2 in states:
            row = []
            for e1, m1 in states:
                row.append(Fraction(e_kernel[e1, m1][e2]) *
                           Fraction(m_kernel[e1, m1][m2]))
            matrix.append(row)
        init = [Fraction(initial[e, m]) for e, m in states]
        spec = MarkovSpec(row_states=(e_symbols, m_symbols), steps=steps,
                          matrix=matrix, initial=init)
        return cls(build_markov_chain(spec), m_row=2, e_row=1)

    @classmethod
    def from_net(cls, net, m_row):
        rows = net.spatial_indices()
        if len(rows) != 2 or m_row not in rows:
            raise LocintError("a perception-action loop needs exactly two rows")
        e_row = rows[0] if rows[1] == m_row else rows[1]
        return cls(net, m_row=m_row, e_row=e_row)

    def m_kernel_prob(self, t, m_next, m_prev, e_prev):
        n = self.m_node(t + 1)
        assignment = {self.m_node(t): m_prev, self.e_node(t): e_prev}
        return self.net.mechanism(n).probability(
            assignment, self.net.state_space(n), m_next)

    def e_kernel_prob(self, t, e_next, m_prev, e_prev):
        n = self.e_node(t + 1)
        assignment = {self.m_node(t): m_prev, self.e_node(t): e_prev}
        return self.net.mechanism(n).probability(
            assignment, self.net.state_space(n), e_next)


def pa_sensor_partition(loop, t, m=None):
    """Environment values with identical influence on the next agent
    state; a kernel-level equivalence. With m given, influence is
    judged at that current agent state alone, otherwise it must agree
    at every current agent state."""
    m_values = loop.m_symbols if m is None else (m,)

    def signature(e):
        return tuple(loop.m_kernel_prob(t, m2, m1, e)
                     for m1 in m_values for m2 in loop.m_symbols)

    return _group_by_signature(loop.e_symbols, signature)


def pa_action_partition(loop, t, e=None):
    """Agent values with identical influence on the next environment
    state; with e given, judged at that current environment state
    alone, otherwise at every current environment state."""
    e_values = loop.e_symbols if e is None else (e,)

    def signature(m):
        return tuple(loop.e_kernel_prob(t, e2, m, e1)
                     for e1 in e_values for e2 in loop.e_symbols)

    return _group_by_signature(loop.m_symbols, signature)


def _group_by_signature(symbols, signature):
    groups = {}
    for s in symbols:
        groups.setdefault(signature(s), []).append(s)
    return SetPartition(groups.values(), ground=symbols)


def extend_pa_loop(loop):
    """Insert sensor and actuator rows carrying the blockwise state of
    the environment and agent, then verify the original joint over the
    agent and environment rows is reproduced exactly."""
    from .model import Mechanism, StateSpace

    T = loop.steps
    sensor_parts = [pa_sensor_partition(loop, t) for t in range(T - 1)]
    action_parts = [pa_action_partition(loop, t) for t in range(T - 1)]
    e_row, m_row, s_row, a_row = loop.e_row, loop.m_row, 3, 4
    while s_row in (e_row, m_row):
        s_row += 2
    while a_row in (e_row, m_row, s_row):
        a_row += 1
    nodes = {}
    mechanisms = {}
    for t in range(T):
        for n in (loop.e_node(t), loop.m_node(t)):
            nodes[n] = loop.net.state_space(n)
            mechanisms[n] = loop.net.mechanism(n)
    for t in range(T - 1):
        s_node, a_node = node(s_row, t), node(a_row, t)
        s_space = StateSpace(tuple(range(len(sensor_parts[t]))))
        a_space = StateSpace(tuple(range(len(action_parts[t]))))
        nodes[s_node] = s_space
        nodes[a_node] = a_space
        e_block = {e: i for i, b in enumerate(sensor_parts[t].blocks) for e in b}
        m_block = {m: i for i, b in enumerate(action_parts[t].blocks) for m in b}
        mechanisms[s_node] = Mechanism(
            (loop.e_node(t),),
            {(e,): tuple(Fraction(1) if i == e_block[e] else Fraction(0)
                         for i in range(len(s_space)))
             for e in loop.e_symbols})
        mechanisms[a_node] = Mechanism(
            (loop.m_node(t),),
            {(m,): tuple(Fraction(1) if i == m_block[m] else Fraction(0)
                         for i in range(len(a_space)))
             for m in loop.m_symbols})
        reps_e = [b[0] for b in sensor_parts[t].blocks]
        reps_m = [b[0] for b in action_parts[t].blocks]
        m_next = loop.m_node(t + 1)
        mechanisms[m_next] = Mechanism(
            (loop.m_node(t), s_node),
            {(m, i): tuple(loop.m_kernel_prob(t, m2, m, reps_e[i])
                           for m2 in loop.m_symbols)
             for m in loop.m_symbols for i in range(len(s_space))})
        e_next = loop.e_node(t + 1)
        mechanisms[e_next] = Mechanism(
            (loop.e_node(t), a_node),
            {(e, i): tuple(loop.e_kernel_prob(t, e2, reps_m[i], e)
                           for e2 in loop.e_symbols)
             for e in loop.e_symbols for i in range(len(a_space))})
    extended = BayesNet(nodes, mechanisms)
    for combo in product(*(loop.net.state_space(n).symbols
                           for n in loop.net.node_ids)):
        pattern = Pattern(dict(zip(loop.net.node_ids, combo)))
        if extended.marginal_probability(pattern) != \
                loop.net.marginal_probability(pattern):
            raise LocintError("extension changed the joint over the loop rows")
    return ExtendedPaLoop(extended, loop, tuple(sensor_parts),
                          tuple(action_parts), s_row, a_row)


class ExtendedPaLoop:
    __slots__ = ("net", "loop", "sensor_partitions", "action_partitions",
                 "s_row", "a_row")

    def __init__(self, net, loop, sensor_partitions, action_partitions,
                 s_row, a_row):
        self.net = net
        self.loop = loop
        self.sensor_partitions = sensor_partitions
        self.action_partitions = action_partitions
        self.s_row = s_row
        self.a_row = a_row


def non_heteronomy(loop, t):
    """Conditional entropy of the next agent state given the current
    environment, with the matching statement about entity actions.

    Returns (bits, has_actions) and insists the two agree: the entropy
    is positive exactly when some agent-row entity acts at t.
    """
    net = loop.net
    h = 0.0
    e_node, m_next = loop.e_node(t), loop.m_node(t + 1)
    for e in loop.e_symbols:
        pe = net.marginal_probability(Pattern({e_node: e}))
        if pe == 0:
            continue
        for m in loop.m_symbols:
            joint = net.marginal_probability(Pattern({e_node: e, m_next: m}))
            if joint == 0:
                continue
            h -= float(joint) * (math.log2(joint.numerator) - math.log2(joint.denominator)
                                 - math.log2(pe.numerator) + math.log2(pe.denominator))
    by_env = {}
    for trajectory, _ in net.enumerate_trajectories():
        key = trajectory[e_node]
        by_env.setdefault(key, set()).add(trajectory[m_next])
    has_actions = any(len(nexts) > 1 for nexts in by_env.values())
    if has_actions != (h > 1e-12):
        raise LocintError("entity actions and non-heteronomy disagree")
    return h, has_actions

"""Discrete Bayesian networks with exact rational probabilities.

Everything downstream (integration scores, hierarchies, perception
analysis) consumes the probability interface defined here. All values
are fractions end to end; floats never enter a computation.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import CapExceeded, ImpossiblePattern, LocintError

TRAJECTORY_CAP = 2 ** 20


@dataclass(frozen=True)
class NodeId:
    """A node name, optionally carrying (space, time) chain coordinates."""

    label: str
    space: int = None
    time: int = None

    def __post_init__(self):
        if (self.space is None) != (self.time is None):
            raise ValueError("space and time must be given together")

    @property
    def has_coordinates(self):
        return self.space is not None

    def sort_key(self):
        if self.has_coordinates:
            return (0, self.time, self.space, self.label)
        return (1, 0, 0, self.label)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return self.label


def node(j, t):
    """The chain node for spatial index j at time t."""
    return NodeId(f"{j}/{t}", space=j, time=t)


class StateSpace:
    """Ordered finite list of the symbols a node can take."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols):
        symbols = tuple(symbols)
        if not symbols:
            raise ValueError("state space needs at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError("duplicate symbols in state space")
        self.symbols = symbols
        self._index = {s: i for i, s in enumerate(symbols)}

    def index(self, symbol):
        try:
            return self._index[symbol]
        except KeyError:
            raise LocintError(f"unknown symbol {symbol!r}") from None

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __eq__(self, other):
        return isinstance(other, StateSpace) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"StateSpace{self.symbols}"


class Mechanism:
    """Conditional distribution of one node given its ordered parents.

    The table maps each parent configuration (a tuple following
    parent_order) to a tuple of probabilities over the node's symbols.
    """

    __slots__ = ("parent_order", "table")

    def __init__(self, parent_order, table):
        self.parent_order = tuple(parent_order)
        self.table = {tuple(k): tuple(Fraction(p) for p in row)
                      for k, row in table.items()}

    @classmethod
    def root(cls, distribution):
        return cls((), {(): tuple(distribution)})

    def row(self, parent_config):
        return self.table[tuple(parent_config)]

    def probability(self, assignment, space, symbol):
        cfg = tuple(assignment[p] for p in self.parent_order)
        return self.table[cfg][space.index(symbol)]


class BayesNet:
    """An immutable Bayesian network over discrete nodes.

    Construction validates acyclicity, table completeness and exact row
    normalization. All probability queries are pure, so a net can be
    shared freely between threads.
    """

    def __init__(self, nodes, mechanisms, markov_spec=None):
        self._spaces = {n: (s if isinstance(s, StateSpace) else StateSpace(s))
                        for n, s in nodes.items()}
        self._mechs = dict(mechanisms)
        self.markov_spec = markov_spec
        if set(self._mechs) != set(self._spaces):
            raise ValueError("mechanisms must cover exactly the declared nodes")
        self.node_ids = tuple(self._spaces)
        coords = [n.has_coordinates for n in self.node_ids]
        if any(coords) and not all(coords):
            raise ValueError("chain coordinates must be on all nodes or none")
        self.has_coordinates = bool(coords) and all(coords)
        self._parents = {n: self._mechs[n].parent_order for n in self.node_ids}
        for n, parents in self._parents.items():
            for p in parents:
                if p not in self._spaces:
                    raise ValueError(f"node {n} has unknown parent {p}")
        self.topo_order = self._toposort()
        self._validate_tables()
        self._marginal_cache = {}

    def _toposort(self):
        remaining = {n: set(self._parents[n]) for n in self.node_ids}
        order = []
        placed = set()
        while remaining:
            ready = [n for n in self.node_ids
                     if n in remaining and remaining[n] <= placed]
            if not ready:
                raise ValueError("parent graph contains a cycle")
            for n in ready:
                order.append(n)
                placed.add(n)
                del remaining[n]
        return tuple(order)

    def _validate_tables(self):
        for n in self.node_ids:
            mech = self._mechs[n]
            size = len(self._spaces[n])
            configs = list(product(*(self._spaces[p].symbols
                                     for p in mech.parent_order)))
            if set(mech.table) != set(configs):
                raise ValueError(f"mechanism of {n} does not cover all parent configurations")
            for cfg, row in mech.table.items():
                if len(row) != size:
                    raise ValueError(f"mechanism row of {n} has wrong arity")
                if any(p < 0 or p > 1 for p in row):
                    raise ValueError(f"mechanism of {n} has probability outside [0,1]")
                if sum(row) != 1:
                    raise ValueError(f"mechanism row of {n} does not sum to 1")

    def state_space(self, n):
        return self._spaces[n]

    def parents(self, n):
        return self._parents[n]

    def mechanism(self, n):
        return self._mechs[n]

    def state_sizes(self):
        return [len(self._spaces[n]) for n in self.node_ids]

    def times(self):
        if not self.has_coordinates:
            raise LocintError("net has no chain coordinates")
        return sorted({n.time for n in self.node_ids})

    def spatial_indices(self):
        if not self.has_coordinates:
            raise LocintError("net has no chain coordinates")
        return sorted({n.space for n in self.node_ids})

    def nodes_at_time(self, t):
        return [n for n in self.node_ids if n.time == t]

    def find_node(self, j, t):
        for n in self.node_ids:
            if n.space == j and n.time == t:
                return n
        raise LocintError(f"no node with coordinates ({j},{t})")

    def _as_items(self, assignment):
        out = {}
        for n, symbol in dict(assignment).items():
            if n not in self._spaces:
                raise LocintError(f"unknown node {n}")
            self._spaces[n].index(symbol)
            out[n] = symbol
        return out

    def joint_probability(self, trajectory):
        items = self._as_items(trajectory)
        if set(items) != set(self.node_ids):
            raise LocintError("joint probability needs a full assignment")
        prob = Fraction(1)
        for n in self.topo_order:
            prob *= self._mechs[n].probability(items, self._spaces[n], items[n])
            if prob == 0:
                return Fraction(0)
        return prob

    def marginal_probability(self, pattern):
        items = self._as_items(pattern)
        if not items:
            return Fraction(1)
        key = frozenset(items.items())
        hit = self._marginal_cache.get(key)
        if hit is not None:
            return hit
        closure = set(items)
        stack = list(items)
        while stack:
            for p in self._parents[stack.pop()]:
                if p not in closure:
                    closure.add(p)
                    stack.append(p)
        order = [n for n in self.topo_order if n in closure]

        def walk(i, assignment):
            if i == len(order):
                return Fraction(1)
            n = order[i]
            space = self._spaces[n]
            if n in items:
                p = self._mechs[n].probability(assignment, space, items[n])
                if p == 0:
                    return Fraction(0)
                assignment[n] = items[n]
                total = p * walk(i + 1, assignment)
                del assignment[n]
                return total
            total = Fraction(0)
            for symbol in space.symbols:
                p = self._mechs[n].probability(assignment, space, symbol)
                if p == 0:
                    continue
                assignment[n] = symbol
                total += p * walk(i + 1, assignment)
                del assignment[n]
            return total

        result = walk(0, {})
        self._marginal_cache[key] = result
        return result

    def conditional_probability(self, target, given):
        target = self._as_items(target)
        given = self._as_items(given)
        denom = self.marginal_probability(given)
        if denom == 0:
            raise ImpossiblePattern("conditioning on a probability-0 pattern")
        for n in set(target) & set(given):
            if target[n] != given[n]:
                return Fraction(0)
        merged = dict(given)
        merged.update(target)
        return self.marginal_probability(merged) / denom

    def morph(self, pattern):
        from .pattern import Pattern

        items = self._as_items(pattern)
        base = self.marginal_probability(items)
        if base == 0:
            raise ImpossiblePattern("morph of a probability-0 pattern")
        rest = [n for n in self.topo_order if n not in items]
        size = 1
        for n in rest:
            size *= len(self._spaces[n])
        if size > TRAJECTORY_CAP:
            raise CapExceeded("morph completion space", size, TRAJECTORY_CAP)
        out = {}
        for combo in product(*(self._spaces[n].symbols for n in rest)):
            completion = dict(zip(rest, combo))
            full = dict(items)
            full.update(completion)
            p = self.joint_probability(full)
            if p > 0:
                out[Pattern(completion)] = p / base
        return out

    def enumerate_trajectories(self, cap=None):
        from .pattern import Pattern

        limit = TRAJECTORY_CAP if cap is None else cap
        size = 1
        for n in self.node_ids:
            size *= len(self._spaces[n])
        if size > limit:
            raise CapExceeded("trajectory space", size, limit)
        order = self.topo_order
        out = []

        def walk(i, assignment, prob):
            if i == len(order):
                out.append((Pattern(dict(assignment)), prob))
                return
            n = order[i]
            space = self._spaces[n]
            for symbol in space.symbols:
                p = self._mechs[n].probability(assignment, space, symbol)
                if p == 0:
                    continue
                assignment[n] = symbol
                walk(i + 1, assignment, prob * p)
                del assignment[n]

        walk(0, {}, Fraction(1))
        return out

    def roots(self):
        return [n for n in self.node_ids if not self._parents[n]]

    def is_deterministic(self):
        """True when every non-root mechanism is a point mass."""
        for n in self.node_ids:
            if not self._parents[n]:
                continue
            for row in self._mechs[n].table.values():
                if any(p not in (0, 1) for p in row):
                    return False
        return True

    def deterministic_pattern_count(self, pattern):
        items = self._as_items(pattern)
        roots = self.roots()
        for n in roots:
            row = self._mechs[n].table[()]
            if any(p != Fraction(1, len(row)) for p in row):
                raise LocintError(f"root {n} is not uniformly distributed")
        if not self.is_deterministic():
            raise LocintError("net has a non-deterministic mechanism")
        size = 1
        for n in roots:
            size *= len(self._spaces[n])
        if size > TRAJECTORY_CAP:
            raise CapExceeded("root configuration space", size, TRAJECTORY_CAP)
        count = 0
        for combo in product(*(self._spaces[n].symbols for n in roots)):
            assignment = dict(zip(roots, combo))
            for n in self.topo_order:
                if n in assignment:
                    continue
                space = self._spaces[n]
                row = self._mechs[n].row(
                    tuple(assignment[p] for p in self._parents[n]))
                assignment[n] = space.symbols[row.index(Fraction(1))]
            if all(assignment[n] == v for n, v in items.items()):
                count += 1
        return count

    def verify_time_slice_markov(self):
        if not self.has_coordinates:
            raise LocintError("net has no chain coordinates")
        times = self.times()
        trajectories = self.enumerate_trajectories()
        for ti in range(len(times) - 1):
            t, t_next = times[ti], times[ti + 1]
            hist_nodes = [n for n in self.node_ids if n.time <= t]
            slice_nodes = [n for n in self.node_ids if n.time == t]
            next_nodes = [n for n in self.node_ids if n.time == t_next]
            hist_p, slice_p = {}, {}
            hist_next_p, slice_next_p = {}, {}
            support = {}
            for traj, p in trajectories:
                hist = tuple(traj[n] for n in hist_nodes)
                cur = tuple(traj[n] for n in slice_nodes)
                nxt = tuple(traj[n] for n in next_nodes)
                hist_p[hist] = hist_p.get(hist, 0) + p
                slice_p[cur] = slice_p.get(cur, 0) + p
                hist_next_p[hist, nxt] = hist_next_p.get((hist, nxt), 0) + p
                slice_next_p[cur, nxt] = slice_next_p.get((cur, nxt), 0) + p
                support.setdefault(cur, set()).add(nxt)
            pos = {n: i for i, n in enumerate(hist_nodes)}
            for hist, ph in hist_p.items():
                cur = tuple(hist[pos[n]] for n in slice_nodes)
                for nxt in support[cur]:
                    lhs = hist_next_p.get((hist, nxt), Fraction(0)) / ph
                    rhs = slice_next_p[cur, nxt] / slice_p[cur]
                    if lhs != rhs:
                        return False
        return True


def joint_probability(net, trajectory):
    return net.joint_probability(trajectory)


def marginal_probability(net, pattern):
    return net.marginal_probability(pattern)


def conditional_probability(net, target, given):
    return net.conditional_probability(target, given)


def morph(net, pattern):
    return net.morph(pattern)


def enumerate_trajectories(net, cap=None):
    return net.enumerate_trajectories(cap=cap)


def deterministic_pattern_count(net, pattern):
    return net.deterministic_pattern_count(pattern)


def verify_time_slice_markov(net):
    return net.verify_time_slice_markov()


@dataclass(frozen=True)
class MarkovSpec:
    """A (possibly driven) multivariate Markov chain in matrix form.

    row_states lists the symbol tuple of each spatial row; the joint
    state space of one time slice is their product in row-major order
    with the first row varying slowest. matrix[next][prev] gives the
    transition probability between joint states, so every column sums
    to 1. steps is the number of time slices. driving_rows marks the
    1-based spatial rows that drive the rest, empty for plain chains.
    """

    row_states: tuple
    steps: int
    matrix: tuple
    initial: tuple
    driving_rows: tuple = ()

    def __post_init__(self):
        rows = tuple(tuple(s) for s in self.row_states)
        object.__setattr__(self, "row_states", rows)
        object.__setattr__(self, "matrix",
                           tuple(tuple(Fraction(x) for x in r) for r in self.matrix))
        object.__setattr__(self, "initial",
                           tuple(Fraction(x) for x in self.initial))
        object.__setattr__(self, "driving_rows", tuple(self.driving_rows))
        if len(rows) < 1:
            raise ValueError("need at least one spatial row")
        if self.steps < 1:
            raise ValueError("need at least one time slice")
        n = 1
        for s in rows:
            if not s:
                raise ValueError("empty row state space")
            n *= len(s)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("matrix shape does not match the joint state space")
        for col in range(n):
            if sum(self.matrix[row][col] for row in range(n)) != 1:
                raise ValueError(f"matrix column {col} does not sum to 1")
        if any(x < 0 or x > 1 for r in self.matrix for x in r):
            raise ValueError("matrix entry outside [0,1]")
        if len(self.initial) != n or sum(self.initial) != 1:
            raise ValueError("initial distribution does not match the state space")
        if any(x < 0 for x in self.initial):
            raise ValueError("negative initial probability")
        bad = [j for j in self.driving_rows if not 1 <= j <= len(rows)]
        if bad or len(set(self.driving_rows)) != len(self.driving_rows):
            raise ValueError("driving_rows must be distinct row indices")
        if len(self.driving_rows) == len(rows) and rows:
            raise ValueError("at least one row must be driven")

    @property
    def n_rows(self):
        return len(self.row_states)

    def joint_states(self):
        return list(product(*self.row_states))

    def state_index(self, config):
        idx = 0
        for j, symbol in enumerate(config):
            idx = idx * len(self.row_states[j]) + self.row_states[j].index(symbol)
        return idx


def _chain_rule_tables(spec):
    """Per-row conditional tables for one transition and for the initial
    slice, following the within-slice order driving-rows-first.

    Where the within-slice conditioning event is impossible the row falls
    back to the distribution conditioned on the previous slice alone
    (on nothing, for the initial slice). Those rows never touch a
    positive-probability trajectory; a fixed convention keeps tables
    total and lets equal rows merge during parent pruning.
    """
    rows = list(range(1, spec.n_rows + 1))
    order = [j for j in rows if j in spec.driving_rows] + \
            [j for j in rows if j not in spec.driving_rows]
    states = spec.joint_states()

    def slice_table(dist_of_prev, prev_configs):
        tables = []
        for k, j in enumerate(order):
            earlier = order[:k]
            symbols = spec.row_states[j - 1]
            table = {}
            for prev in prev_configs:
                dist = dist_of_prev(prev)
                for evals in product(*(spec.row_states[e - 1] for e in earlier)):
                    fixed = dict(zip(earlier, evals))
                    num = {v: Fraction(0) for v in symbols}
                    den = Fraction(0)
                    for cfg, p in zip(states, dist):
                        if all(cfg[e - 1] == fixed[e] for e in earlier):
                            num[cfg[j - 1]] += p
                            den += p
                    if den == 0:
                        fallback = {v: Fraction(0) for v in symbols}
                        for cfg, p in zip(states, dist):
                            fallback[cfg[j - 1]] += p
                        row = tuple(fallback[v] for v in symbols)
                    else:
                        row = tuple(num[v] / den for v in symbols)
                    table[prev + tuple(evals)] = row
            tables.append((j, earlier, table))
        return tables

    transition = slice_table(
        lambda prev: [spec.matrix[i][spec.state_index(prev)] for i in range(len(states))],
        states)
    initial = slice_table(lambda prev: list(spec.initial), [()])
    return order, transition, initial


def _prune_parents(parent_order, table):
    """Drop parents whose value never changes the row, repeatedly."""
    parent_order = list(parent_order)
    while True:
        dropped = False
        for i in range(len(parent_order)):
            merged = {}
            ok = True
            for cfg, row in table.items():
                rest = cfg[:i] + cfg[i + 1:]
                if merged.setdefault(rest, row) != row:
                    ok = False
                    break
            if ok:
                del parent_order[i]
                table = merged
                dropped = True
                break
        if not dropped:
            return tuple(parent_order), table


def build_markov_chain(spec):
    """Unroll a MarkovSpec into a Bayesian network with (j,t) nodes.

    Each slice is factored row by row by the chain rule, then every
    mechanism loses the parents its table provably ignores. The result
    is verified to reproduce the matrix and initial distribution exactly
    before it is returned.
    """
    order, transition, initial = _chain_rule_tables(spec)
    rows = list(range(1, spec.n_rows + 1))
    nodes = {}
    for t in range(spec.steps):
        for j in rows:
            nodes[node(j, t)] = StateSpace(spec.row_states[j - 1])
    mechanisms = {}
    for j, earlier, table in initial:
        parents = tuple(node(e, 0) for e in earlier)
        pruned_parents, pruned = _prune_parents(parents, table)
        mechanisms[node(j, 0)] = Mechanism(pruned_parents, pruned)
    for t in range(1, spec.steps):
        for j, earlier, table in transition:
            parents = tuple(node(i, t - 1) for i in rows) + \
                      tuple(node(e, t) for e in earlier)
            pruned_parents, pruned = _prune_parents(parents, table)
            mechanisms[node(j, t)] = Mechanism(pruned_parents, pruned)
    net = BayesNet(nodes, mechanisms, markov_spec=spec)
    _verify_against_spec(net, spec)
    if spec.driving_rows:
        _verify_driven_structure(net, spec)
    return net


def _verify_against_spec(net, spec):
    states = spec.joint_states()
    rows = list(range(1, spec.n_rows + 1))
    for cfg in states:
        assignment = {node(j, 0): cfg[j - 1] for j in rows}
        built = Fraction(1)
        for j in rows:
            n = node(j, 0)
            built *= net.mechanism(n).probability(assignment, net.state_space(n), cfg[j - 1])
        if built != spec.initial[spec.state_index(cfg)]:
            raise LocintError("chain factorization does not reproduce the initial distribution")
    for t in range(1, spec.steps):
        for prev in states:
            for cur in states:
                assignment = {node(j, t - 1): prev[j - 1] for j in rows}
                assignment.update({node(j, t): cur[j - 1] for j in rows})
                built = Fraction(1)
                for j in rows:
                    n = node(j, t)
                    built *= net.mechanism(n).probability(
                        assignment, net.state_space(n), cur[j - 1])
                if built != spec.matrix[spec.state_index(cur)][spec.state_index(prev)]:
                    raise LocintError("chain factorization does not reproduce the matrix")


def _verify_driven_structure(net, spec):
    driven = [j for j in range(1, spec.n_rows + 1) if j not in spec.driving_rows]
    for t in range(1, spec.steps):
        for j in driven:
            for p in net.parents(node(j, t)):
                if p.time == t - 1 and p.space in spec.driving_rows:
                    raise LocintError(
                        "matrix does not factor as a driven chain: "
                        f"driven node {node(j, t)} depends on driving node {p}")


def mc_const_spec(steps=3):
    """Two binary rows copied forward unchanged, uniform start."""
    states = [(0, 0), (0, 1), (1, 0), (1, 1)]
    matrix = [[Fraction(1) if a == b else Fraction(0) for b in range(4)]
              for a in range(4)]
    return MarkovSpec(row_states=((0, 1), (0, 1)), steps=steps,
                      matrix=matrix, initial=[Fraction(1, 4)] * 4)


def mc_eps_spec(eps=Fraction(1, 100), steps=3):
    """Two binary rows that each persist except for a small symmetric
    chance of switching to any other joint state."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 3):
        raise ValueError("eps must lie strictly between 0 and 1/3")
    matrix = [[1 - 3 * eps if a == b else eps for b in range(4)]
              for a in range(4)]
    return MarkovSpec(row_states=((0, 1), (0, 1)), steps=steps,
                      matrix=matrix, initial=[Fraction(1, 4)] * 4)

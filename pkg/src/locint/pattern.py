"""Spatiotemporal patterns: partial assignments over a net's nodes.

A pattern stores no probabilities and no reference to a net; it is a
pure value bound to a net only at call sites.
"""

from itertools import product

from .errors import LocintError, ParseError
from .model import NodeId


class Pattern:
    """An immutable partial assignment of symbols to nodes."""

    __slots__ = ("_items", "_map")

    def __init__(self, assignments=()):
        items = tuple(sorted(dict(assignments).items(),
                             key=lambda kv: kv[0].sort_key()))
        self._items = items
        self._map = dict(items)

    @property
    def nodes(self):
        return tuple(n for n, _ in self._items)

    @property
    def domain(self):
        return frozenset(self._map)

    def items(self):
        return self._items

    def keys(self):
        return self.nodes

    def values(self):
        return tuple(v for _, v in self._items)

    def get(self, n, default=None):
        return self._map.get(n, default)

    def __getitem__(self, n):
        return self._map[n]

    def __contains__(self, n):
        return n in self._map

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self):
        return len(self._items)

    def __bool__(self):
        return bool(self._items)

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        return f"Pattern({self.render()})"

    def render(self):
        return ",".join(f"{n}={v}" for n, v in self._items)

    def restrict(self, nodes):
        nodes = set(nodes)
        return Pattern({n: v for n, v in self._items if n in nodes})

    def merge(self, other):
        """Union of two patterns; shared nodes must agree."""
        for n in self._map.keys() & set(other.domain if isinstance(other, Pattern) else other):
            if self._map[n] != other[n]:
                raise LocintError(f"patterns disagree at {n}")
        combined = dict(self._items)
        combined.update(dict(other))
        return Pattern(combined)

    def agrees_with(self, other):
        return all(self._map[n] == other[n]
                   for n in self._map.keys() & set(dict(other)))

    def times(self):
        self._need_coordinates()
        return sorted({n.time for n in self._map})

    def spatial_indices(self):
        self._need_coordinates()
        return sorted({n.space for n in self._map})

    def time_slice(self, t):
        self._need_coordinates()
        return TimeSlice({n: v for n, v in self._items if n.time == t}, time=t)

    def up_to(self, t):
        """The sub-pattern on nodes with time at most t."""
        self._need_coordinates()
        return Pattern({n: v for n, v in self._items if n.time <= t})

    def after(self, t):
        """The sub-pattern on nodes with time strictly greater than t."""
        self._need_coordinates()
        return Pattern({n: v for n, v in self._items if n.time > t})

    def _need_coordinates(self):
        if any(not n.has_coordinates for n in self._map):
            raise LocintError("pattern has nodes without chain coordinates")


class TimeSlice(Pattern):
    """A pattern whose nodes all share one time coordinate."""

    __slots__ = ("time",)

    def __init__(self, assignments=(), time=None):
        super().__init__(assignments)
        ts = {n.time for n in self.nodes}
        if len(ts) > 1:
            raise ValueError("time slice spans several times")
        if ts:
            t = ts.pop()
            if time is not None and time != t:
                raise ValueError("time slice nodes disagree with the given time")
            time = t
        self.time = time


def parse_pattern(text, net):
    """Parse the CLI literal syntax, e.g. "1/0=0,2/2=1"."""
    text = text.strip()
    if not text:
        return Pattern()
    by_label = {str(n): n for n in net.node_ids}
    out = {}
    for chunk in text.split(","):
        if "=" not in chunk:
            raise ParseError(f"expected node=symbol, got {chunk!r}")
        left, right = chunk.split("=", 1)
        left, right = left.strip(), right.strip()
        if left not in by_label:
            raise ParseError(f"unknown node {left!r}")
        n = by_label[left]
        symbol = None
        for s in net.state_space(n).symbols:
            if str(s) == right:
                symbol = s
                break
        if symbol is None:
            raise ParseError(f"unknown symbol {right!r} for node {left}")
        if n in out:
            raise ParseError(f"node {left} assigned twice")
        out[n] = symbol
    return Pattern(out)


def occurs_in(pattern, trajectory):
    """True when the trajectory restricted to the pattern's domain equals
    the pattern. Empty patterns occur everywhere."""
    return all(n in trajectory and trajectory[n] == v
               for n, v in pattern.items())


def trajectory_set(net, pattern, possible_only=True):
    """The trajectories in which the pattern occurs, in enumeration order."""
    if possible_only:
        return [traj for traj, _ in net.enumerate_trajectories()
                if occurs_in(pattern, traj)]
    out = []
    order = net.topo_order
    for combo in product(*(net.state_space(n).symbols for n in order)):
        traj = Pattern(dict(zip(order, combo)))
        if occurs_in(pattern, traj):
            out.append(traj)
    return out


def anti_patterns(net, pattern):
    """All assignments on the same domain that differ at every node."""
    if not pattern:
        raise LocintError("the empty pattern has no anti-patterns")
    nodes = pattern.nodes
    choices = []
    for n in nodes:
        choices.append([s for s in net.state_space(n).symbols if s != pattern[n]])
    return [Pattern(dict(zip(nodes, combo))) for combo in product(*choices)]


def anti_patterns_wrt(net, pattern, partition):
    """All assignments on the same domain that differ from the pattern
    inside every block of the partition."""
    if set(partition.ground) != pattern.domain:
        raise LocintError("partition does not partition the pattern's domain")
    per_block = []
    for block in partition.blocks:
        target = tuple(pattern[n] for n in block)
        alts = [combo for combo in product(*(net.state_space(n).symbols for n in block))
                if combo != target]
        per_block.append([dict(zip(block, combo)) for combo in alts])
    out = []
    for pick in product(*per_block):
        combined = {}
        for d in pick:
            combined.update(d)
        out.append(Pattern(combined))
    return out


def classify_composite(pattern):
    """Spatial, temporal and spatiotemporal compositeness flags."""
    slices = {}
    pattern._need_coordinates()
    for n in pattern.nodes:
        slices.setdefault(n.time, []).append(n)
    spatial = any(len(v) > 1 for v in slices.values())
    temporal = len(slices) > 1
    return {"spatial": spatial, "temporal": temporal,
            "spatiotemporal": spatial and temporal}


def traverses_dof(pattern):
    """True when two nonempty time slices occupy different spatial rows."""
    pattern._need_coordinates()
    slices = {}
    for n in pattern.nodes:
        slices.setdefault(n.time, set()).add(n.space)
    index_sets = list(slices.values())
    return any(a != b for a in index_sets for b in index_sets)


def variation(p, q):
    """How two patterns differ: in value, in extent, or both."""
    if p.domain == q.domain:
        return "equal" if p == q else "value"
    shared = p.domain & q.domain
    if any(p[n] != q[n] for n in shared):
        return "value_and_extent"
    return "extent"


def ascii_grid(net, pattern):
    """Grid render with one line per spatial row, one column per time;
    unfixed nodes print as a dot."""
    rows = net.spatial_indices()
    times = net.times()
    lines = []
    for j in rows:
        cells = []
        for t in times:
            n = net.find_node(j, t)
            cells.append(str(pattern[n]) if n in pattern else ".")
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def pgm_grid(net, pattern):
    """Plain PGM render of the same grid; unfixed nodes are mid grey."""
    rows = net.spatial_indices()
    times = net.times()
    pixels = []
    for j in rows:
        line = []
        for t in times:
            n = net.find_node(j, t)
            if n not in pattern:
                line.append(128)
            else:
                space = net.state_space(n)
                k = space.index(pattern[n])
                line.append(255 if len(space) == 1 else k * 255 // (len(space) - 1))
        pixels.append(line)
    header = f"P2\n{len(times)} {len(rows)}\n255\n"
    body = "\n".join(" ".join(str(v) for v in line) for line in pixels)
    return header + body + "\n"

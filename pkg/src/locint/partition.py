"""Set partitions of finite node sets and their refinement lattice.

Partitions are kept in a canonical form built on restricted growth
strings over the sorted ground set, which makes equality, hashing and
lexicographic enumeration cheap.
"""

from functools import lru_cache
from math import comb

from .errors import CapExceeded, ParseError

PARTITION_CAP = 13


def _check_cap(n, cap):
    limit = PARTITION_CAP if cap is None else cap
    if n > limit:
        raise CapExceeded("partition ground set", n, limit)


class SetPartition:
    """A partition of a finite ground set into disjoint nonempty blocks."""

    __slots__ = ("_ground", "_rgs", "_blocks")

    def __init__(self, blocks, ground=None):
        blocks = [tuple(sorted(b)) for b in blocks]
        seen = set()
        for b in blocks:
            if not b:
                raise ValueError("empty block")
            for x in b:
                if x in seen:
                    raise ValueError(f"element {x!r} occurs in two blocks")
                seen.add(x)
        if ground is None:
            ground = sorted(seen)
        else:
            ground = sorted(ground)
            if set(ground) != seen:
                raise ValueError("blocks do not cover the ground set")
        index = {x: i for i, x in enumerate(ground)}
        blocks.sort(key=lambda b: index[b[0]])
        rgs = [0] * len(ground)
        for label, b in enumerate(blocks):
            for x in b:
                rgs[index[x]] = label
        self._ground = tuple(ground)
        self._rgs = tuple(rgs)
        self._blocks = tuple(blocks)

    @classmethod
    def from_rgs(cls, ground, rgs):
        """Build directly from a restricted growth string over an already
        sorted ground tuple. No validation beyond block assembly."""
        self = object.__new__(cls)
        nblocks = max(rgs) + 1 if rgs else 0
        blocks = [[] for _ in range(nblocks)]
        for x, label in zip(ground, rgs):
            blocks[label].append(x)
        self._ground = tuple(ground)
        self._rgs = tuple(rgs)
        self._blocks = tuple(tuple(b) for b in blocks)
        return self

    @classmethod
    def unit(cls, ground):
        ground = tuple(sorted(ground))
        return cls.from_rgs(ground, (0,) * len(ground))

    @classmethod
    def zero(cls, ground):
        ground = tuple(sorted(ground))
        return cls.from_rgs(ground, tuple(range(len(ground))))

    @property
    def ground(self):
        return self._ground

    @property
    def rgs(self):
        return self._rgs

    @property
    def blocks(self):
        return self._blocks

    def __len__(self):
        return len(self._blocks)

    def __iter__(self):
        return iter(self._blocks)

    def __eq__(self, other):
        if not isinstance(other, SetPartition):
            return NotImplemented
        return self._ground == other._ground and self._rgs == other._rgs

    def __hash__(self):
        return hash((self._ground, self._rgs))

    def __repr__(self):
        return f"SetPartition({self.render()})"

    def render(self):
        return "|".join("{" + ",".join(str(x) for x in b) + "}" for b in self._blocks)

    @classmethod
    def parse(cls, text, ground):
        """Inverse of render, given the ground set whose elements print
        to the tokens used in the text."""
        by_token = {str(x): x for x in ground}
        blocks = []
        for part in text.split("|"):
            part = part.strip()
            if not (part.startswith("{") and part.endswith("}")):
                raise ParseError(f"malformed block {part!r}")
            members = []
            for tok in part[1:-1].split(","):
                tok = tok.strip()
                if tok not in by_token:
                    raise ParseError(f"unknown element {tok!r}")
                members.append(by_token[tok])
            blocks.append(members)
        return cls(blocks, ground=ground)

    @property
    def is_unit(self):
        return len(self._blocks) == 1

    @property
    def is_zero(self):
        return len(self._blocks) == len(self._ground)

    def block_of(self, x):
        return self._blocks[self._rgs[self._ground.index(x)]]

    def _labels(self):
        return dict(zip(self._ground, self._rgs))

    def refines(self, other):
        """True when every block of self lies inside a block of other."""
        if self._ground != other._ground:
            raise ValueError("partitions have different ground sets")
        lab = other._rgs
        pos = {x: i for i, x in enumerate(self._ground)}
        for b in self._blocks:
            target = lab[pos[b[0]]]
            if any(lab[pos[x]] != target for x in b[1:]):
                return False
        return True

    def join(self, other):
        """Least common coarsening."""
        if self._ground != other._ground:
            raise ValueError("partitions have different ground sets")
        parent = list(range(len(self._ground)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        pos = {x: i for i, x in enumerate(self._ground)}
        for part in (self, other):
            for b in part._blocks:
                root = find(pos[b[0]])
                for x in b[1:]:
                    parent[find(pos[x])] = root
        groups = {}
        for x in self._ground:
            groups.setdefault(find(pos[x]), []).append(x)
        return SetPartition(groups.values(), ground=self._ground)

    def meet(self, other):
        """Greatest common refinement, from pairwise block intersections."""
        if self._ground != other._ground:
            raise ValueError("partitions have different ground sets")
        blocks = []
        for a in self._blocks:
            sa = set(a)
            for b in other._blocks:
                both = sa.intersection(b)
                if both:
                    blocks.append(both)
        return SetPartition(blocks, ground=self._ground)

    def restrict(self, subset):
        """The partition {b ∩ A} on A with empty intersections dropped."""
        subset = set(subset)
        if not subset:
            raise ValueError("cannot restrict to an empty set")
        if not subset.issubset(self._ground):
            raise ValueError("restriction set is not inside the ground set")
        blocks = []
        for b in self._blocks:
            kept = [x for x in b if x in subset]
            if kept:
                blocks.append(kept)
        return SetPartition(blocks, ground=sorted(subset))


def refines(finer, coarser):
    return finer.refines(coarser)


def join(a, b):
    return a.join(b)


def meet(a, b):
    return a.meet(b)


def covers(finer, coarser):
    """True when coarser arises from finer by merging exactly two blocks."""
    if finer.ground != coarser.ground:
        raise ValueError("partitions have different ground sets")
    return len(finer) == len(coarser) + 1 and finer.refines(coarser)


def restrict(partition, subset):
    return partition.restrict(subset)


def _rgs_strings(n):
    rgs = [0] * n
    maxes = [0] * n
    while True:
        yield tuple(rgs)
        i = n - 1
        while i > 0 and rgs[i] == maxes[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        maxes[i] = max(maxes[i - 1], rgs[i])
        for j in range(i + 1, n):
            rgs[j] = 0
            maxes[j] = maxes[i]


def enumerate_partitions(ground, cap=None):
    """All partitions of the ground set in restricted-growth lexicographic
    order, starting with the unit partition."""
    ground = tuple(sorted(ground))
    if not ground:
        raise ValueError("ground set is empty")
    _check_cap(len(ground), cap)
    for rgs in _rgs_strings(len(ground)):
        yield SetPartition.from_rgs(ground, rgs)


@lru_cache(maxsize=None)
def bell(n):
    if n < 0 or n > max(PARTITION_CAP, 30):
        raise ValueError(f"bell number index {n} out of range")
    if n == 0:
        return 1
    return sum(comb(n - 1, k) * bell(k) for k in range(n))


@lru_cache(maxsize=None)
def stirling2(n, k):
    if n < 0 or k < 0 or n > max(PARTITION_CAP, 30):
        raise ValueError(f"stirling index ({n},{k}) out of range")
    if k > n:
        return 0
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


class PartitionPoset:
    """A set of partitions on one ground set, ordered by refinement.

    Covering is judged relative to the member set, so a Hasse edge means
    no intermediate member sits between its endpoints, even when the full
    lattice would have one.
    """

    def __init__(self, elements):
        elements = list(dict.fromkeys(elements))
        if not elements:
            raise ValueError("poset needs at least one element")
        ground = elements[0].ground
        for p in elements:
            if p.ground != ground:
                raise ValueError("poset elements have different ground sets")
        elements.sort(key=lambda p: (len(p), p.rgs))
        self.ground = ground
        self.elements = tuple(elements)

    def hasse_edges(self):
        edges = []
        for p in self.elements:
            above = [q for q in self.elements if q != p and p.refines(q)]
            for q in above:
                if not any(z != q and z.refines(q) for z in above):
                    edges.append((p, q))
        return edges

    def components(self):
        """Connected components of the Hasse diagram, largest first."""
        adj = {p: set() for p in self.elements}
        for a, b in self.hasse_edges():
            adj[a].add(b)
            adj[b].add(a)
        seen = set()
        comps = []
        for p in self.elements:
            if p in seen:
                continue
            stack = [p]
            comp = []
            while stack:
                q = stack.pop()
                if q in seen:
                    continue
                seen.add(q)
                comp.append(q)
                stack.extend(adj[q] - seen)
            comp.sort(key=lambda r: (len(r), r.rgs))
            comps.append(tuple(comp))
        comps.sort(key=lambda c: (-len(c), c[0].rgs))
        return comps

    def to_dot(self, name="poset"):
        """Graphviz source with one rank per block count."""
        ids = {p: f"p{i}" for i, p in enumerate(self.elements)}
        lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=box];"]
        by_card = {}
        for p in self.elements:
            by_card.setdefault(len(p), []).append(p)
        for card in sorted(by_card):
            group = " ".join(ids[p] + ";" for p in by_card[card])
            lines.append(f"  {{ rank=same; {group} }}")
        for p in self.elements:
            lines.append(f'  {ids[p]} [label="{p.render()}"];')
        for finer, coarser in self.hasse_edges():
            lines.append(f"  {ids[finer]} -> {ids[coarser]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def hasse_edges(poset):
    return poset.hasse_edges()


def _state_sizes(net):
    if hasattr(net, "state_sizes"):
        return list(net.state_sizes())
    return [int(s) for s in net]


def sli_workload(net, mode):
    """Exact number of SLI evaluations for a full analysis of the net.

    Exhaustive mode sums |X_A| * Bell(|A|) over every nonempty node
    subset A, folded with elementary symmetric polynomials; there is one
    evaluation per pattern and partition. Disintegration mode scores every
    partition of every full trajectory: |X_V| * Bell(|V|).
    """
    sizes = _state_sizes(net)
    n = len(sizes)
    if mode == "disintegration":
        total = 1
        for s in sizes:
            total *= s
        return total * bell(n)
    if mode != "exhaustive":
        raise ValueError(f"unknown workload mode {mode!r}")
    elem = [1] + [0] * n
    for s in sizes:
        for k in range(n, 0, -1):
            elem[k] += elem[k - 1] * s
    return sum(elem[k] * bell(k) for k in range(1, n + 1))

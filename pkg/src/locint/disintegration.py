"""Disintegration hierarchies of whole trajectories and the entities
their refinement-free partitions expose.

One trajectory's hierarchy scores every partition of the full node set
and groups partitions by exact score, ascending. Scoring runs through
the arithmetic backend: per-trajectory agreement masks feed a superset
sum transform, after which each partition costs one multiply chain over
its block masks instead of a fresh marginalization.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import lcm

from . import _backend
from .errors import ImpossiblePattern, LocintError
from .integration import SliValue, cli, sli
from .partition import PartitionPoset, SetPartition, bell, enumerate_partitions
from .pattern import Pattern

CHUNK = 2048


class Hierarchy:
    """Disintegration levels of one trajectory, finest score first."""

    def __init__(self, trajectory, levels):
        self.trajectory = trajectory
        self.levels = tuple((value, tuple(parts)) for value, parts in levels)

    def __len__(self):
        return len(self.levels)

    def level(self, i):
        """1-based level access; the coarsest level is level 1."""
        if not 1 <= i <= len(self.levels):
            raise IndexError(f"hierarchy has no level {i}")
        return self.levels[i - 1]

    def level_of(self, partition):
        for i, (value, parts) in enumerate(self.levels, start=1):
            if partition in parts:
                return i, value
        raise LocintError("partition not found in hierarchy")

    def level_poset(self, i):
        return PartitionPoset(self.level(i)[1])

    def to_json(self, elide_above=64, indent=None):
        levels = []
        for value, parts in self.levels:
            row = {
                "ratio": f"{value.ratio.numerator}/{value.ratio.denominator}",
                "bits": value.bits(),
                "partition_count": len(parts),
            }
            if len(parts) <= elide_above:
                row["partitions"] = [p.render() for p in parts]
            levels.append(row)
        return json.dumps({"trajectory": self.trajectory.render(),
                           "levels": levels}, indent=indent)


class RefinementFreeHierarchy:
    """The hierarchy with every partition dropped that has a proper
    refinement at its own or any earlier level."""

    def __init__(self, trajectory, levels):
        self.trajectory = trajectory
        self.levels = tuple((value, tuple(parts)) for value, parts in levels)

    def __len__(self):
        return len(self.levels)

    def level(self, i):
        if not 1 <= i <= len(self.levels):
            raise IndexError(f"hierarchy has no level {i}")
        return self.levels[i - 1]

    def all_partitions(self):
        out = []
        for _, parts in self.levels:
            out.extend(parts)
        return out

    def level_poset(self, i):
        parts = self.level(i)[1]
        if not parts:
            raise LocintError(f"level {i} is empty after refinement filtering")
        return PartitionPoset(parts)

    def to_json(self, elide_above=64, indent=None):
        levels = []
        for value, parts in self.levels:
            row = {
                "ratio": f"{value.ratio.numerator}/{value.ratio.denominator}",
                "bits": value.bits(),
                "partition_count": len(parts),
            }
            if len(parts) <= elide_above:
                row["partitions"] = [p.render() for p in parts]
            levels.append(row)
        return json.dumps({"trajectory": self.trajectory.render(),
                           "levels": levels}, indent=indent)


class IotaEntity:
    """A completely integrated pattern found inside a trajectory."""

    __slots__ = ("pattern", "iota", "witness_partition", "witnesses")

    def __init__(self, pattern, iota, witness_partition, witnesses):
        self.pattern = pattern
        self.iota = iota
        self.witness_partition = witness_partition
        self.witnesses = tuple(witnesses)

    def __repr__(self):
        return f"IotaEntity({self.pattern.render()}, {self.iota!r})"


def _agreement_masks(net, trajectory, ground):
    trajectories = net.enumerate_trajectories()
    denom = lcm(*(p.denominator for _, p in trajectories))
    counts = [0] * (1 << len(ground))
    found = False
    for traj, p in trajectories:
        mask = 0
        agree_all = True
        for i, n in enumerate(ground):
            if traj[n] == trajectory[n]:
                mask |= 1 << i
            else:
                agree_all = False
        counts[mask] += int(p * denom)
        found = found or agree_all
    if not found:
        raise ImpossiblePattern("trajectory has probability 0")
    return counts, denom


def disintegration_hierarchy(net, trajectory, threads=1, cap=None):
    """Group every partition of the trajectory's node set by exact
    integration ratio, levels ascending.

    With threads > 1 the partition stream is scored in fixed-size chunks
    farmed out to a pool; chunk results are merged in submission order,
    so the outcome is identical for every thread count.
    """
    if set(trajectory.domain) != set(net.node_ids):
        raise LocintError("disintegration needs a full trajectory")
    ground = tuple(sorted(net.node_ids))
    counts, denom = _agreement_masks(net, trajectory, ground)
    sums = _backend.superset_sums(counts, len(ground))

    pos = {n: i for i, n in enumerate(ground)}

    def block_masks(partition):
        masks = []
        for b in partition.blocks:
            m = 0
            for n in b:
                m |= 1 << pos[n]
            masks.append(m)
        return tuple(masks)

    def score_chunk(chunk):
        ratios = _backend.partition_ratios(
            sums, denom, [block_masks(p) for p in chunk])
        return [Fraction(num, den) for num, den in ratios]

    groups = {}

    def absorb(chunk, ratios):
        for partition, ratio in zip(chunk, ratios):
            groups.setdefault(ratio, []).append(partition)

    stream = enumerate_partitions(ground, cap=cap)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pending = []
            while True:
                chunk = []
                for partition in stream:
                    chunk.append(partition)
                    if len(chunk) == CHUNK:
                        break
                if not chunk:
                    break
                pending.append((chunk, pool.submit(score_chunk, chunk)))
                if len(chunk) < CHUNK:
                    break
            for chunk, future in pending:
                absorb(chunk, future.result())
    else:
        chunk = []
        for partition in stream:
            chunk.append(partition)
            if len(chunk) == CHUNK:
                absorb(chunk, score_chunk(chunk))
                chunk = []
        if chunk:
            absorb(chunk, score_chunk(chunk))

    levels = [(SliValue(r), groups[r]) for r in sorted(groups)]
    return Hierarchy(trajectory, levels)


def refinement_free(hierarchy):
    """Drop each partition with a proper refinement at its own or any
    earlier level. A proper refinement always has strictly more blocks,
    which bounds the candidate scan."""
    kept_levels = []
    earlier = []
    for value, parts in hierarchy.levels:
        pool = earlier + list(parts)
        by_size = {}
        for q in pool:
            by_size.setdefault(len(q), []).append(q)
        kept = []
        for p in parts:
            has_refinement = False
            for size, candidates in by_size.items():
                if size <= len(p):
                    continue
                if any(q.refines(p) for q in candidates):
                    has_refinement = True
                    break
            if not has_refinement:
                kept.append(p)
        kept_levels.append((value, kept))
        earlier = pool
    return RefinementFreeHierarchy(hierarchy.trajectory, kept_levels)


def iota_entities(net, trajectory, hierarchy=None, threads=1):
    """All completely integrated patterns inside one trajectory.

    These are the non-singleton blocks of the refinement-free levels,
    deduplicated, each re-scored with an independent cli() pass over
    marginals rather than the hierarchy's own arithmetic.
    """
    if hierarchy is None:
        hierarchy = disintegration_hierarchy(net, trajectory, threads=threads)
    rfree = refinement_free(hierarchy)
    found = {}
    for level_index, (value, parts) in enumerate(rfree.levels, start=1):
        for partition in parts:
            for block in partition.blocks:
                if len(block) < 2:
                    continue
                key = frozenset(block)
                entry = found.setdefault(key, [])
                entry.append((level_index, partition))
    out = []
    for key in sorted(found, key=lambda k: tuple(sorted(k))):
        witnesses = found[key]
        pattern = trajectory.restrict(key)
        result = cli(net, pattern)
        if result.value.ratio <= 1:
            raise LocintError(
                f"refinement-free block {pattern.render()} is not completely integrated")
        out.append(IotaEntity(pattern, result.value, result.witness, witnesses))
    return out


def entity_set_union(net, threads=1):
    """Entities of every possible trajectory, deduplicated by pattern."""
    seen = {}
    for trajectory, _ in net.enumerate_trajectories():
        for entity in iota_entities(net, trajectory, threads=threads):
            seen.setdefault(entity.pattern, entity)
    return [seen[p] for p in sorted(seen, key=lambda q: (tuple(sorted(q.domain)),
                                                         tuple(str(v) for v in q.values())))]


def verify_disintegration_theorem(net, trajectory, threads=1,
                                  _fault_skip_refinement=False):
    """Exhaustively check both directions of the correspondence between
    refinement-free blocks and completely integrated patterns.

    Direction a: every non-singleton block of every refinement-free
    partition is completely integrated (independent cli() route).
    Direction b: every pattern with positive complete local integration
    occurring in the trajectory appears as {A} plus singletons at its
    own level of the refinement-free hierarchy.

    The fault flag skips the refinement filter so tests can prove the
    check has teeth; it must never be set in real use.
    """
    hierarchy = disintegration_hierarchy(net, trajectory, threads=threads)
    if _fault_skip_refinement:
        rfree = RefinementFreeHierarchy(trajectory, hierarchy.levels)
    else:
        rfree = refinement_free(hierarchy)

    a_checked = 0
    a_violations = []
    scored = {}
    for value, parts in rfree.levels:
        for partition in parts:
            for block in partition.blocks:
                if len(block) < 2:
                    continue
                a_checked += 1
                key = frozenset(block)
                if key not in scored:
                    scored[key] = cli(net, trajectory.restrict(block))
                result = scored[key]
                if result.value.ratio <= 1:
                    a_violations.append({
                        "partition": partition.render(),
                        "block": trajectory.restrict(block).render(),
                        "iota_ratio": str(result.value.ratio),
                    })

    ground = tuple(sorted(net.node_ids))
    b_entities = 0
    b_violations = []
    n = len(ground)
    for mask in range(1, 1 << n):
        block = [ground[i] for i in range(n) if mask >> i & 1]
        if len(block) < 2:
            continue
        pattern = trajectory.restrict(block)
        result = cli(net, pattern)
        if result.value.ratio <= 1:
            continue
        b_entities += 1
        rest = [n_ for n_ in ground if n_ not in block]
        candidate = SetPartition([block] + [[r] for r in rest], ground=ground)
        level_index, _ = hierarchy.level_of(candidate)
        present = candidate in rfree.level(level_index)[1]
        if not present:
            b_violations.append({
                "entity": pattern.render(),
                "partition": candidate.render(),
                "level": level_index,
            })

    return {
        "trajectory": trajectory.render(),
        "direction_a": {"checked": a_checked, "violations": a_violations},
        "direction_b": {"entities": b_entities, "violations": b_violations},
        "passed": not a_violations and not b_violations,
    }

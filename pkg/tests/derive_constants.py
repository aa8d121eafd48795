"""One-off derivation run: prints the constants frozen in the test suite.

Run from the repository root:  python tests/derive_constants.py
"""

import itertools
import math
import sys
from fractions import Fraction

sys.path.insert(0, "tests")
import oracles as o


def cached_chain(chain):
    cache = {}
    orig = chain.marginal

    def marginal(pattern):
        key = tuple(sorted(pattern.items()))
        if key not in cache:
            cache[key] = orig(pattern)
        return cache[key]

    chain.marginal = marginal
    return chain


def main():
    print("bell(6) =", o.bell(6))
    print("bell(7) =", o.bell(7))
    print("stirling row 6:", [o.stirling2(6, k) for k in range(1, 7)])
    w_dis = 2 ** 6 * o.bell(6)
    w_exh = sum(
        math.comb(6, k) * 2 ** k * o.bell(k) for k in range(1, 7)
    )
    print("workload disintegration:", w_dis)
    print("workload exhaustive:", w_exh)

    mc = cached_chain(o.mc_const_chain())
    trajs = mc.trajectories()
    print("mc-const trajectories:", len(trajs),
          sorted(set(p for _, p in trajs)))

    for traj, _ in trajs:
        levels = o.hierarchy(mc, traj)
        row = [(str(r), len(ps)) for r, ps in levels]
        print("mc-const levels:", row)

    traj0 = trajs[0][0]
    levels = o.hierarchy(mc, traj0)
    for idx in (1, 2):
        comps = o.level_components(levels[idx][1])
        sizes = sorted(len(c) for c in comps)
        print(f"mc-const level {idx} components:", sizes)
    comps4 = o.level_components(levels[4][1])
    print("mc-const level 4 components:", sorted(len(c) for c in comps4))

    for traj, _ in trajs:
        ents = o.iota_entities(mc, traj)
        doms = sorted(sorted(n for n, _ in e) for e in ents)
        print("mc-const entities:", len(ents),
              sorted(set(str(r) for r in ents.values())))
    print("mc-const entity domains (last traj):", doms)

    x1t = {(1, 0): 0, (1, 1): 0, (1, 2): 0}
    full_ratio = o.sli_ratio(mc, x1t, (((1, 0),), ((1, 1),), ((1, 2),)))
    bi_ratio = o.sli_ratio(mc, x1t, (((1, 0),), ((1, 1), (1, 2))))
    print("mc-const x1T singletons ratio:", full_ratio)
    print("mc-const x1T bipartition ratio:", bi_ratio)
    print("mc-const x1T min nonunit:", o.min_nonunit_ratio(mc, x1t))

    me = cached_chain(o.mc_eps_chain())
    etrajs = me.trajectories()
    probs = {}
    for _, p in etrajs:
        probs[p] = probs.get(p, 0) + 1
    print("mc-eps classes:", sorted((str(p), c) for p, c in probs.items()))

    reps = {
        "x1": {(1, 0): 0, (2, 0): 1, (1, 1): 0, (2, 1): 1, (1, 2): 0, (2, 2): 1},
        "x2": {(1, 0): 0, (2, 0): 1, (1, 1): 0, (2, 1): 1, (1, 2): 0, (2, 2): 0},
        "x3": {(1, 0): 0, (2, 0): 1, (1, 1): 0, (2, 1): 0, (1, 2): 0, (2, 2): 1},
    }
    for name, traj in reps.items():
        print(name, "prob:", me.marginal(traj))

    iota_all = []
    for name, traj in reps.items():
        ents = o.iota_entities(me, traj)
        vals = sorted(ents.values())
        iota_all.extend(vals)
        print(name, "entities:", len(ents),
              "min", vals[0], float(math.log2(vals[0])),
              "max", vals[-1], float(math.log2(vals[-1])))
        levels = o.hierarchy(me, traj)
        print(name, "level count:", len(levels))
    lo, hi = min(iota_all), max(iota_all)
    print("mc-eps iota range:", lo, float(math.log2(lo)),
          hi, float(math.log2(hi)))

    # branch morphs at t=0
    x_a = {(2, 0): 1, (1, 1): 0, (1, 2): 0, (2, 2): 1}
    y_b = {(2, 0): 1, (1, 1): 1, (1, 2): 1, (2, 2): 1}
    z_c = {(2, 0): 1, (1, 1): 1, (2, 1): 1, (1, 2): 1, (2, 2): 1}
    m1 = o.branch_morph(me, [x_a, y_b], x_a, 0)
    print("zeta {x,y} morphs:", {k: [str(f) for f in v] for k, v in m1.items()})
    m2 = o.branch_morph(me, [x_a, z_c], x_a, 0)
    print("zeta {x,z} morphs:", {k: [str(f) for f in v] for k, v in m2.items()})
    joint = dict(y_b)
    joint.update(z_c)
    print("Pr(y_B, z_C) =", me.marginal(joint))

    print("mc-eps morph support from (0,0):",
          sum(1 for _, p in etrajs
              if p > 0))


if __name__ == "__main__":
    main()

"""Compare the compiled arithmetic kernels against the pure-Python ones.

Run as a script:

    python3 benchmarks/bench_kernels.py

Two micro benchmarks exercise the kernels directly, then one end-to-end
benchmark runs the full disintegration pipeline in a subprocess per
backend, selected through LOCINT_PURE.
"""

import os
import random
import subprocess
import sys
import time
from fractions import Fraction

try:
    import locint._ckernels as compiled
except ImportError:
    compiled = None
import locint._kernels as pure


def best_of(fn, repeats=5):
    best = None
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best


def bench_superset_sums(n, rng):
    values = [rng.randrange(0, 1000) for _ in range(1 << n)]
    row = {"case": f"superset_sums n={n}"}
    row["pure"] = best_of(lambda: pure.superset_sums(list(values), n))
    if compiled:
        row["compiled"] = best_of(
            lambda: compiled.superset_sums(list(values), n))
    return row


def bench_partition_ratios(n, batches, rng):
    values = [rng.randrange(1, 1000) for _ in range(1 << n)]
    sums = pure.superset_sums(list(values), n)
    denom = sum(values)
    partitions = []
    for _ in range(batches):
        labels = [rng.randrange(0, 4) for _ in range(n)]
        blocks = {}
        for bit, lab in enumerate(labels):
            blocks[lab] = blocks.get(lab, 0) | (1 << bit)
        partitions.append(tuple(sorted(blocks.values())))
    row = {"case": f"partition_ratios n={n} x{batches}"}
    row["pure"] = best_of(
        lambda: pure.partition_ratios(sums, denom, partitions))
    if compiled:
        row["compiled"] = best_of(
            lambda: compiled.partition_ratios(sums, denom, partitions))
    return row


def bench_pipeline():
    script = (
        "from fractions import Fraction\n"
        "from locint import *\n"
        "net = build_markov_chain(mc_eps_spec(Fraction(1, 100)))\n"
        "for x, p in enumerate_trajectories(net):\n"
        "    disintegration_hierarchy(net, x)\n"
    )
    row = {"case": "hierarchy, 64 trajectories"}
    for name, force in (("pure", True), ("compiled", False)):
        if force is False and compiled is None:
            continue
        env = {k: v for k, v in os.environ.items() if k != "LOCINT_PURE"}
        if force:
            env["LOCINT_PURE"] = "1"
        start = time.perf_counter()
        subprocess.run([sys.executable, "-c", script], env=env, check=True)
        row[name] = time.perf_counter() - start
    return row


def main():
    rng = random.Random(2024)
    rows = [
        bench_superset_sums(10, rng),
        bench_superset_sums(16, rng),
        bench_partition_ratios(6, 203, rng),
        bench_partition_ratios(12, 500, rng),
        bench_pipeline(),
    ]
    width = max(len(r["case"]) for r in rows)
    print(f"{'case':<{width}}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}")
    for r in rows:
        p = r.get("pure")
        c = r.get("compiled")
        speed = f"{p / c:6.2f}x" if p and c else "    n/a"
        ctext = f"{c:10.4f}" if c is not None else "       n/a"
        print(f"{r['case']:<{width}}  {p:10.4f}  {ctext}  {speed:>8}")
    if compiled is None:
        print("extension not built; compiled column unavailable")


if __name__ == "__main__":
    main()

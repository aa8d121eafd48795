"""The compiled and pure kernels must be interchangeable bit for bit."""

import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest

import locint
import locint._kernels as pure
from locint import disintegration_hierarchy, enumerate_trajectories

compiled = pytest.importorskip(
    "locint._ckernels", reason="extension not built")


def random_case(rng, n):
    size = 1 << n
    values = [rng.randrange(0, 50) for _ in range(size)]
    partitions = []
    for _ in range(rng.randrange(1, 12)):
        labels = [rng.randrange(0, 3) for _ in range(n)]
        blocks = {}
        for bit, lab in enumerate(labels):
            blocks[lab] = blocks.get(lab, 0) | (1 << bit)
        partitions.append(tuple(sorted(blocks.values())))
    return values, partitions


def test_superset_sums_agree():
    rng = random.Random(3)
    for n in range(1, 10):
        values, _ = random_case(rng, n)
        assert pure.superset_sums(list(values), n) == \
            compiled.superset_sums(list(values), n)


def test_superset_sums_definition():
    rng = random.Random(5)
    for n in range(1, 7):
        values, _ = random_case(rng, n)
        sums = pure.superset_sums(list(values), n)
        for mask in range(1 << n):
            direct = sum(v for s, v in enumerate(values)
                         if s & mask == mask)
            assert sums[mask] == direct


def test_partition_ratios_agree():
    rng = random.Random(7)
    for n in range(2, 9):
        values, partitions = random_case(rng, n)
        sums = pure.superset_sums(list(values), n)
        denom = max(sum(values), 1)
        a = pure.partition_ratios(sums, denom, partitions)
        b = compiled.partition_ratios(sums, denom, partitions)
        assert a == b


def test_partition_ratios_match_fraction_arithmetic():
    rng = random.Random(11)
    n = 6
    values, partitions = random_case(rng, n)
    sums = pure.superset_sums(list(values), n)
    denom = max(sum(values), 1)
    full = (1 << n) - 1
    pairs = pure.partition_ratios(sums, denom, partitions)
    for part, (num, den) in zip(partitions, pairs):
        k = len(part)
        expected = Fraction(sums[full], denom)
        for block in part:
            expected /= Fraction(sums[block], denom)
        assert Fraction(num, den) == expected


def test_huge_counts_fall_back_to_bignum():
    # force values far beyond 64 bits so the compiled path must switch
    # to arbitrary precision
    big = 1 << 80
    values = [big] * 8
    sums_pure = pure.superset_sums(list(values), 3)
    sums_comp = compiled.superset_sums(list(values), 3)
    assert sums_pure == sums_comp
    parts = [(0b001, 0b110), (0b111,), (0b001, 0b010, 0b100)]
    a = pure.partition_ratios(sums_pure, big * 8, parts)
    b = compiled.partition_ratios(sums_comp, big * 8, parts)
    assert a == b


def test_environment_override_selects_pure_backend():
    env = dict(os.environ, LOCINT_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import locint; print(locint.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "pure"


@pytest.mark.skipif(bool(os.environ.get("LOCINT_PURE")),
                    reason="pure backend forced via environment")
def test_default_backend_is_compiled():
    assert locint.BACKEND == "compiled"


def test_hierarchy_bytes_identical_across_backends(tmp_path):
    script = (
        "from fractions import Fraction\n"
        "from locint import *\n"
        "net = build_markov_chain(mc_eps_spec(Fraction(1, 100)))\n"
        "x = [t for t, p in enumerate_trajectories(net)][21]\n"
        "h = disintegration_hierarchy(net, x)\n"
        "import sys; sys.stdout.write(h.to_json())\n"
    )
    outputs = []
    for force in (False, True):
        env = {k: v for k, v in os.environ.items() if k != "LOCINT_PURE"}
        if force:
            env["LOCINT_PURE"] = "1"
        out = subprocess.run([sys.executable, "-c", script],
                             capture_output=True, text=True, env=env,
                             check=True)
        outputs.append(out.stdout)
    assert outputs[0] == outputs[1]
    assert outputs[0]

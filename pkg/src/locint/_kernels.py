"""Pure-Python reference kernels for the hot arithmetic loops.

The compiled module _ckernels mirrors these signatures exactly; the
active implementation is chosen in _backend. Everything works on plain
integers so results are exact and identical across backends.
"""


def superset_sums(values, n):
    """In-place zeta transform: out[m] = sum of values[s] over s ⊇ m.

    values is a list of length 2**n indexed by node bitmask.
    """
    out = list(values)
    for i in range(n):
        bit = 1 << i
        for mask in range(len(out)):
            if not mask & bit:
                out[mask] += out[mask | bit]
    return out


def partition_ratios(subset_sums, denominator, partitions):
    """Unreduced SLI ratios for a batch of partitions of one trajectory.

    subset_sums[mask] counts trajectories agreeing on the mask, scaled
    so probabilities are subset_sums[mask]/denominator. Each partition
    is a tuple of block bitmasks. Returns (numerator, denominator)
    pairs for p_V / prod_b p_b.
    """
    full = subset_sums[-1]
    out = []
    for blocks in partitions:
        num = full
        for _ in range(len(blocks) - 1):
            num *= denominator
        den = 1
        for mask in blocks:
            den *= subset_sums[mask]
        out.append((num, den))
    return out

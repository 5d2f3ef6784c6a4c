"""Bit-mask helpers for subsets of the column index set.

Column ``a`` (0-based) is bit ``1 << a``.  Public output converts to
1-based indices.
"""
from itertools import combinations


def mask_of(indices):
    m = 0
    for a in indices:
        m |= 1 << a
    return m


def members(mask):
    """Ascending tuple of 0-based indices set in ``mask``."""
    out = []
    a = 0
    while mask:
        if mask & 1:
            out.append(a)
        mask >>= 1
        a += 1
    return tuple(out)


def popcount(mask):
    return bin(mask).count("1")


def k_subsets(n, k):
    """All k-subsets of range(n) as masks, in lexicographic tuple order."""
    return [mask_of(c) for c in combinations(range(n), k)]


def all_subsets(n):
    return range(1 << n)


def lex_key(mask):
    return members(mask)


def to_one_based(mask):
    return [a + 1 for a in members(mask)]


def from_one_based(indices, n):
    m = 0
    for a in indices:
        if not 1 <= a <= n:
            raise IndexError(a)
        m |= 1 << (a - 1)
    return m


def label(mask):
    """Compact 1-based label such as '134' (comma separated if n > 9)."""
    idx = to_one_based(mask)
    if any(a > 9 for a in idx):
        return ",".join(map(str, idx))
    return "".join(map(str, idx))

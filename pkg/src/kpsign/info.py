"""Kullback-Leibler divergences of solitonic signature codes."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .connectivity import ClassPartition, classes
from .errors import BadRange, InequalityViolated
from .model import MinorTable
from .signature import RowColSigns, induced_signature
from .strata import omega
from .subsets import k_subsets, popcount

LN2 = math.log(2)


def _ln(q) -> float:
    """Natural log of a positive rational with big-integer parts."""
    q = Fraction(q)
    return math.log(q.numerator) - math.log(q.denominator)


@dataclass(frozen=True)
class InfoReport:
    G: int
    n: int
    P: int
    kl_star: float
    kl_fixed_s: float | None = None
    induced_weights: tuple | None = None
    kl_induced: float | None = None


def kl_star(G: int, n: int, P: int) -> float:
    """ln 2 (G - n + P - 1) for a uniform prior over sign strings.

    Nonnegativity is the consistency condition G + P >= n + 1.
    """
    if G + P < n + 1:
        raise InequalityViolated(f"G + P = {G + P} < n + 1 = {n + 1}")
    return LN2 * (G - n + P - 1)


def kl_fixed_s(n: int, k: int, s: int, column_only: bool = False) -> float:
    """Divergence when the flip count s is known (all maximal minors nonzero)."""
    if n < 1 or not 1 <= k <= n or not 0 <= s <= n:
        raise BadRange(f"need 1 <= k <= n and 0 <= s <= n, got ({n},{k},{s})")
    big = comb(n, k)
    om = omega(n, k, s)
    value = _ln(Fraction(comb(big, om), comb(n, s)))
    if 2 * om == big and not column_only:
        value -= LN2
    return value


def generic_class_count(n: int, k: int) -> int:
    return n if k == n else 1


# ---------------------------------------------------------------------------
# induced distributions


def _flip_sets(n, s):
    return range(1 << n) if s is None else k_subsets(n, s)


def induced_distribution(table: MinorTable, s=None):
    """(signature string, weight) pairs over all (R, S) with #S = s.

    ``s=None`` ranges over every flip set.  Classes are keyed by the
    canonical signature string and returned in key order.
    """
    n = table.n
    if s is not None and not 0 <= s <= n:
        raise BadRange(f"s={s} outside [0, {n}]")
    counts = Counter()
    total = 0
    for S in _flip_sets(n, s):
        for r in (1, -1):
            counts[induced_signature(table, RowColSigns(r, S)).to_string()] += 1
            total += 1
    return [(key, Fraction(c, total)) for key, c in sorted(counts.items())]


def kl_from_weights(weights, G: int) -> float:
    return math.fsum(float(p) * (_ln(p) + G * LN2) for p in weights)


def kl_induced(table: MinorTable, s=None) -> float:
    return kl_from_weights([p for _, p in induced_distribution(table, s)], table.G)


def balancing_subsets(partition: ClassPartition, S: int):
    """Class subsets p whose union swaps as many columns in as out of S.

    Returned as masks over class indices.  A flip set S' = S ^ union(p)
    keeps the size of S exactly for these p.
    """
    sizes = [popcount(c) for c in partition.classes]
    inside = [popcount(c & S) for c in partition.classes]
    out = []
    for sub in range(1 << partition.P):
        qs = [q for q in range(partition.P) if sub >> q & 1]
        if sum(sizes[q] for q in qs) == 2 * sum(inside[q] for q in qs):
            out.append(sub)
    return out


def kl_induced_by_multiplicity(table: MinorTable, s=None, partition=None) -> float:
    """Same divergence from predicted class sizes instead of explicit grouping."""
    part = partition or classes(table)
    n = table.n
    flips = list(_flip_sets(n, s))
    total = 2 * len(flips)
    terms = []
    for S in flips:
        mult = len(balancing_subsets(part, S)) if s is not None else 2 ** part.P
        p = Fraction(mult, total)
        terms.append(2 * (_ln(p) + table.G * LN2))
    return math.fsum(terms) / total


# ---------------------------------------------------------------------------
# grid


GRID_HEADER = ("n", "k", "s", "kl_star", "kl_fixed_s", "diff")


def kl_grid(n_range, k_range, s_range):
    """Rows (n, k, s, kl_star, kl_fixed_s, kl_star - kl_fixed_s), all minors nonzero.

    Cells need 1 <= k < n and 0 <= s <= n; others are skipped.
    """
    rows = []
    for n in n_range:
        for k in k_range:
            if not 1 <= k < n:
                continue
            star = kl_star(comb(n, k), n, generic_class_count(n, k))
            for s in s_range:
                if not 0 <= s <= n:
                    continue
                fixed = kl_fixed_s(n, k, s)
                rows.append((n, k, s, star, fixed, star - fixed))
    return rows


def grid_csv(rows) -> str:
    lines = [",".join(GRID_HEADER)]
    for n, k, s, a, b, c in rows:
        lines.append(f"{n},{k},{s},{a:.15g},{b:.15g},{c:.15g}")
    return "\n".join(lines) + "\n"

"""Visible strata counts, negatives families and the leverage identity."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import (
    BadRange,
    InternalInconsistency,
    LimitExceeded,
    SingularLocus,
)
from .model import (
    SolitonModel,
    TauExpansion,
    _check_weights,
    bareiss_det,
    solve_inverse,
    term_weights,
)
from .subsets import k_subsets, popcount


def _check_range(n, k, s):
    if n < 0 or not 0 <= k <= n or not 0 <= s <= n:
        raise BadRange(f"need 0 <= k, s <= n, got n={n}, k={k}, s={s}")


def omega_sum(n, k, s) -> int:
    """#{I in P_k[n] : #(I & S) odd} for any S of size s, as a parity sum."""
    return sum(comb(s, a) * comb(n - s, k - a) for a in range(1, min(s, k) + 1, 2))


def hyp2f1_terminating(a: int, b: int, c: int, z) -> Fraction:
    """Exact 2F1(a, b; c; z) for a nonpositive integer a and c > 0."""
    z = Fraction(z)
    term = Fraction(1)
    total = Fraction(1)
    j = 0
    while True:
        if a + j == 0 or b + j == 0:
            break
        term = term * (a + j) * (b + j) / ((c + j) * (j + 1)) * z
        total += term
        j += 1
    return total


def _omega_closed_lower(n, k, s) -> Fraction:
    # valid when n >= k + s
    return Fraction(comb(n, k), 2) - Fraction(comb(n - s, k), 2) * hyp2f1_terminating(
        -s, -k, n - s - k + 1, -1
    )


def omega_closed(n, k, s) -> Fraction:
    """Hypergeometric closed form, branching on n >= k + s."""
    _check_range(n, k, s)
    if n >= k + s:
        return _omega_closed_lower(n, k, s)
    e = -1 if (n - k - s) % 2 else 1
    return Fraction((1 - e) * comb(n, k), 2) + e * _omega_closed_lower(n, n - k, n - s)


def omega(n, k, s) -> int:
    _check_range(n, k, s)
    value = omega_sum(n, k, s)
    if omega_closed(n, k, s) != value:
        raise InternalInconsistency(f"closed form disagrees at ({n},{k},{s})")
    return value


def omega_brute(n, k, s) -> int:
    smask = (1 << s) - 1
    return sum(1 for m in k_subsets(n, k) if popcount(m & smask) % 2)


def duality_check(n, k, s) -> bool:
    _check_range(n, k, s)
    return comb(n, s) * omega(n, k, s) == comb(n, k) * omega(n, s, k)


# ---------------------------------------------------------------------------
# negatives


@dataclass(frozen=True)
class NegativesFamily:
    weights: tuple
    level: object  # int or "all"
    members: tuple  # masks, ascending
    values: dict  # mask -> signed tau value


def negatives(expansion: TauExpansion, weights, s="all", cap=20, force=False) -> NegativesFamily:
    n = expansion.n
    tw = term_weights(expansion, weights)
    if s == "all":
        if n > cap and not force:
            raise LimitExceeded(f"n={n} exceeds the level-all cap {cap}")
        flips = range(1 << n)
    else:
        if not 0 <= s <= n:
            raise BadRange(f"s={s} outside [0, {n}]")
        flips = k_subsets(n, s)
    items = list(tw.items())
    vals = {}
    found = []
    for S in flips:
        v = sum((-w if popcount(m & S) % 2 else w for m, w in items), Fraction(0))
        vals[S] = v
        if v < 0:
            found.append(S)
    th = tuple(_check_weights(weights, n))
    return NegativesFamily(th, s, tuple(sorted(found)), vals)


def disjoint_negatives_search(family, k):
    """Search for 2k pairwise disjoint members; returns them or None."""
    mems = family.members if isinstance(family, NegativesFamily) else tuple(family)
    mems = sorted(set(mems))
    need = 2 * k

    def rec(start, used, chosen):
        if len(chosen) == need:
            return list(chosen)
        for i in range(start, len(mems)):
            m = mems[i]
            if m & used:
                continue
            chosen.append(m)
            got = rec(i + 1, used | m, chosen)
            if got:
                return got
            chosen.pop()
        return None

    return rec(0, 0, [])


# ---------------------------------------------------------------------------
# leverage


@dataclass(frozen=True)
class LeverageReport:
    diagonal: tuple
    trace: Fraction
    flip_ratios: tuple
    tau: Fraction


def _vandermonde_rows(kappa, k):
    return [[Fraction(c) ** j for j in range(k)] for c in kappa]


def _weighted_product(matrix, weights, kmat, flip=None):
    k = len(matrix)
    n = len(weights)
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            s = Fraction(0)
            for a in range(n):
                x = matrix[i][a] * weights[a] * kmat[a][j]
                s += -x if a == flip else x
            row.append(s)
        out.append(row)
    return out


def leverage(model: SolitonModel, weights) -> LeverageReport:
    th = _check_weights(weights, model.n)
    kmat = _vandermonde_rows(model.kappa, model.k)
    m = _weighted_product(model.matrix, th, kmat)
    tau = bareiss_det(m)
    if tau == 0:
        raise SingularLocus("tau vanishes at these weights")
    inv = solve_inverse(m)
    k, n = model.k, model.n
    at = [[model.matrix[i][a] * th[a] for a in range(n)] for i in range(k)]
    lmat = [[sum(inv[i][r] * at[r][a] for r in range(k)) for a in range(n)] for i in range(k)]
    # L K = identity makes K L idempotent
    for i in range(k):
        for j in range(k):
            v = sum(lmat[i][a] * kmat[a][j] for a in range(n))
            if v != (1 if i == j else 0):
                raise InternalInconsistency("L is not a left inverse of K")
    diag = tuple(sum(kmat[a][i] * lmat[i][a] for i in range(k)) for a in range(n))
    ratios = []
    for a in range(n):
        direct = bareiss_det(_weighted_product(model.matrix, th, kmat, flip=a)) / tau
        if direct != 1 - 2 * diag[a]:
            raise InternalInconsistency(f"single flip ratio mismatch at column {a + 1}")
        ratios.append(direct)
    return LeverageReport(diag, sum(diag, Fraction(0)), tuple(ratios), tau)


def dominant_negatives(n, s, dominant_mask):
    """Members predicted in the regime where one basis dominates."""
    return tuple(sorted(S for S in k_subsets(n, s) if popcount(S & dominant_mask) % 2))


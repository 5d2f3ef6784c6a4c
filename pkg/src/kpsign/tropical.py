"""Dominant terms, nested regrouping and column copies."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import BadIndex
from .model import (
    MinorTable,
    SolitonModel,
    TauExpansion,
    _check_weights,
    bareiss_det,
    cauchy_binet,
    compute_minors,
    term_weights,
    vandermonde,
)
from .subsets import mask_of, members


def _check_order(order, n):
    order = tuple(order)
    if sorted(order) != list(range(n)):
        raise BadIndex(f"order must be a permutation of 0..{n - 1}")
    return order


def dominant_subset(table: MinorTable, order) -> int:
    """Lexicographically least basis when columns are read in ``order``."""
    order = _check_order(order, table.n)
    rank = {a: i for i, a in enumerate(order)}
    return min(table.support, key=lambda m: sorted(rank[a] for a in members(m)))


@dataclass(frozen=True)
class NestedExpansion:
    order: tuple
    dominant: int
    chain: tuple  # members of the dominant basis in order
    groups: tuple  # groups[r] = masks whose longest dominant prefix has length r


def nested_groups(table: MinorTable, order) -> NestedExpansion:
    order = _check_order(order, table.n)
    dom = dominant_subset(table, order)
    rank = {a: i for i, a in enumerate(order)}
    chain = tuple(sorted(members(dom), key=rank.__getitem__))
    groups = [[] for _ in range(table.k + 1)]
    for m in table.support:
        r = 0
        while r < len(chain) and m >> chain[r] & 1:
            r += 1
        groups[r].append(m)
    return NestedExpansion(order, dom, chain, tuple(tuple(g) for g in groups))


def nested_eval(nested: NestedExpansion, expansion: TauExpansion, weights) -> Fraction:
    """Evaluate tau through the nested form, innermost group first."""
    th = _check_weights(weights, expansion.n)
    tw = term_weights(expansion, th)
    chain = nested.chain
    k = len(chain)
    inner = sum((tw[m] for m in nested.groups[k]), Fraction(0))
    inner /= _prod(th[a] for a in chain)
    for r in range(k - 1, -1, -1):
        prefix = _prod(th[a] for a in chain[:r])
        inner = th[chain[r]] * inner + sum((tw[m] for m in nested.groups[r]), Fraction(0)) / prefix
    return inner


def _prod(values):
    out = Fraction(1)
    for v in values:
        out *= v
    return out


def ray_weights(order, base=2, t=64):
    """Surrogate exponentials base**(t * w) with w strictly decreasing along ``order``.

    Powers of two for w make every subset sum distinct.
    """
    n = len(order)
    w = [0] * n
    for i, a in enumerate(order):
        w[a] = 2 ** (n - 1 - i)
    return [Fraction(base) ** (t * x) for x in w]


def ray_argmax(expansion: TauExpansion, order, base=2, t=64) -> int:
    th = ray_weights(order, base, t)
    tw = term_weights(expansion, th)
    return max(tw, key=lambda m: abs(tw[m]))


# ---------------------------------------------------------------------------
# copies


@dataclass(frozen=True)
class CopyModel:
    """Model with one or more columns repeated (kappa no longer distinct)."""

    matrix: tuple
    kappa: tuple
    d: int
    origin: tuple  # original column of each new column

    @property
    def k(self):
        return len(self.matrix)

    @property
    def n(self):
        return len(self.kappa)


def _copy(model: SolitonModel, counts) -> CopyModel:
    origin = []
    for a in range(model.n):
        origin.extend([a] * counts[a])
    matrix = tuple(tuple(row[a] for a in origin) for row in model.matrix)
    kappa = tuple(model.kappa[a] for a in origin)
    return CopyModel(matrix, kappa, model.d, tuple(origin))


def copy_soliton(model: SolitonModel, col: int, m: int) -> CopyModel:
    """Repeat column ``col`` (0-based) so it occurs ``m`` times in a row."""
    if not 0 <= col < model.n:
        raise BadIndex(f"column {col + 1} outside 1..{model.n}")
    if m < 1:
        raise BadIndex("m must be at least 1")
    counts = [1] * model.n
    counts[col] = m
    return _copy(model, counts)


def copy_all(model: SolitonModel, m: int) -> CopyModel:
    if m < 1:
        raise BadIndex("m must be at least 1")
    return _copy(model, [m] * model.n)


def copy_terms(cm: CopyModel) -> dict:
    """Cauchy-Binet terms of the enlarged matrix (repeated kappa give zero)."""
    out = {}
    for cols in combinations(range(cm.n), cm.k):
        mask = mask_of(cols)
        v = vandermonde(cm.kappa, mask)
        if v == 0:
            continue
        minor = bareiss_det([[row[c] for c in cols] for row in cm.matrix])
        if minor != 0:
            out[mask] = minor * v
    return out


def copy_weights(cm: CopyModel, weights):
    return [weights[a] for a in cm.origin]


def copy_determinant(cm: CopyModel, weights) -> Fraction:
    """det(A' Theta' K') evaluated directly as a k x k determinant."""
    th = copy_weights(cm, weights)
    k = cm.k
    rows = [
        [sum(cm.matrix[i][a] * th[a] * cm.kappa[a] ** j for a in range(cm.n)) for j in range(k)]
        for i in range(k)
    ]
    return bareiss_det(rows)


@dataclass(frozen=True)
class CopyReport:
    col: int
    m: int
    weights: tuple
    direct: Fraction
    expanded: Fraction
    sigma_in: Fraction
    sigma_out: Fraction
    tau: Fraction
    matches: bool
    singular: bool
    singular_relation: bool | None  # sigma_in == -sigma_out when tau == 0


def copy_identity_check(model: SolitonModel, col: int, m: int, weights) -> CopyReport:
    """Compare the copied determinant with m * sigma_in + sigma_out."""
    th = _check_weights(weights, model.n)
    cm = copy_soliton(model, col, m)
    table = compute_minors(model)
    tw = term_weights(cauchy_binet(model, table), th)
    s_in = sum((w for I, w in tw.items() if I >> col & 1), Fraction(0))
    s_out = sum((w for I, w in tw.items() if not I >> col & 1), Fraction(0))
    direct = copy_determinant(cm, th)
    cth = copy_weights(cm, th)
    expanded = Fraction(0)
    for mask, g in copy_terms(cm).items():
        expanded += g * _prod(cth[a] for a in members(mask))
    tau = s_in + s_out
    ok = direct == expanded == m * s_in + s_out
    singular = tau == 0
    rel = (s_in == -s_out) if singular else None
    return CopyReport(col, m, tuple(th), direct, expanded, s_in, s_out, tau, ok, singular, rel)


def singular_weights(expansion: TauExpansion, col: int, weights):
    """Retune weight ``col`` so that tau vanishes exactly, if a positive value exists."""
    th = _check_weights(weights, expansion.n)
    th[col] = Fraction(1)
    tw = term_weights(expansion, th)
    lin = sum((w for I, w in tw.items() if I >> col & 1), Fraction(0))
    const = sum((w for I, w in tw.items() if not I >> col & 1), Fraction(0))
    if lin == 0:
        return None
    value = -const / lin
    if value <= 0:
        return None
    th[col] = value
    return th

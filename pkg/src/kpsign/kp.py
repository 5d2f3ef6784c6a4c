"""Bilinear KP II residual of signed tau expansions.

Writing f = sum_I s_I g_I exp(phi_I), the Hirota form D_KP(f, f) is a sum
over unordered pairs {A, B} of 2 s_A g_A s_B g_B C(A, B) exp(phi_A + phi_B).
Pairs are grouped by (A & B, A | B), which fixes the phase multiset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .model import MinorTable, TauExpansion
from .signature import Signature, check_domain
from .subsets import members


def _power_sum_diff(a_mask, b_mask, kappa, u):
    return sum(kappa[a] ** u for a in members(a_mask)) - sum(kappa[b] ** u for b in members(b_mask))


def hirota_coefficient(a_mask: int, b_mask: int, kappa) -> Fraction:
    kap = [Fraction(c) for c in kappa]
    p1 = _power_sum_diff(a_mask, b_mask, kap, 1)
    p2 = _power_sum_diff(a_mask, b_mask, kap, 2)
    p3 = _power_sum_diff(a_mask, b_mask, kap, 3)
    return p1 ** 4 + 3 * p2 ** 2 - 4 * p1 * p3


@dataclass(frozen=True)
class BilinearResidual:
    groups: dict  # (intersection mask, union mask) -> Fraction

    def nonzero(self) -> dict:
        return {key: v for key, v in self.groups.items() if v != 0}

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.groups.values())


class ResidualKernel:
    """Precomputed pair weights of one expansion.

    The pair weights 2 g_A g_B C(A, B) are scaled to integers by a common
    positive factor so that repeated evaluation over many signatures stays
    cheap; zero tests are unaffected by the scaling.
    """

    def __init__(self, expansion: TauExpansion):
        self.expansion = expansion
        self.order = tuple(sorted(expansion.terms))
        index = {m: i for i, m in enumerate(self.order)}
        keys = {}
        raw = []
        terms = expansion.terms
        for a, b in combinations(self.order, 2):
            key = (a & b, a | b)
            if key not in keys:
                keys[key] = len(keys)
            c = hirota_coefficient(a, b, expansion.kappa)
            w = 2 * terms[a] * terms[b] * c
            raw.append((keys[key], index[a], index[b], w))
        self.keys = tuple(keys)
        den = math.lcm(*(w.denominator for *_, w in raw)) if raw else 1
        self.scale = den
        self.pairs = tuple((kk, i, j, int(w * den)) for kk, i, j, w in raw if w != 0)

    def accumulate(self, values) -> list:
        """Integer group sums for signs ``values`` aligned with ``self.order``."""
        acc = [0] * len(self.keys)
        for kk, i, j, w in self.pairs:
            if values[i] == values[j]:
                acc[kk] += w
            else:
                acc[kk] -= w
        return acc

    def is_zero(self, values) -> bool:
        return not any(self.accumulate(values))

    def residual(self, sig: Signature) -> BilinearResidual:
        check_domain(self.expansion.terms, sig)
        vals = sig.as_dict()
        acc = self.accumulate([vals[m] for m in self.order])
        return BilinearResidual({key: Fraction(v, self.scale) for key, v in zip(self.keys, acc)})


def kp_residual(expansion: TauExpansion, sig: Signature) -> BilinearResidual:
    return ResidualKernel(expansion).residual(sig)


def is_solitonic(expansion: TauExpansion, sig: Signature) -> bool:
    return kp_residual(expansion, sig).is_zero


def triple_consistency(table: MinorTable, sig: Signature):
    """Violations of the three-term sign law.

    For I, J in the basis family with I - J = {a1, a2} and J - I = {d1, d2},
    every exchange pair (I - a1 + dT, I - a2 + dU) lying in the family must
    carry the sign product of (I, J).  Returns tuples (I, a1, a2, dT, dU).
    """
    check_domain(table.support, sig)
    vals = sig.as_dict()
    fam = table.support
    bad = []
    for i_mask, j_mask in combinations(sorted(fam), 2):
        out = i_mask & ~j_mask
        inn = j_mask & ~i_mask
        if bin(out).count("1") != 2:
            continue
        a1, a2 = members(out)
        d1, d2 = members(inn)
        target = vals[i_mask] * vals[j_mask]
        for dt, du in ((d1, d2), (d2, d1)):
            x = i_mask & ~(1 << a1) | (1 << dt)
            y = i_mask & ~(1 << a2) | (1 << du)
            if x in vals and y in vals and vals[x] * vals[y] != target:
                bad.append((i_mask, a1, a2, dt, du))
    return bad


def collision_audit(expansion: TauExpansion, degree=4):
    """Distinct group keys whose phase power sums p_1..p_degree coincide."""
    seen = {}
    clashes = []
    kap = expansion.kappa
    order = sorted(expansion.terms)
    keys = {(a & b, a | b) for a, b in combinations(order, 2)}
    for h, l in sorted(keys):
        sig = tuple(
            sum(kap[x] ** u for x in members(h)) + sum(kap[x] ** u for x in members(l))
            for u in range(1, degree + 1)
        )
        if sig in seen:
            clashes.append((seen[sig], (h, l)))
        else:
            seen[sig] = (h, l)
    return clashes

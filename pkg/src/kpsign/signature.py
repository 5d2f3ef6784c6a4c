"""Signatures on the basis family and their row/column-flip origin."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainMismatch, ParseError
from .model import MinorTable, TauExpansion
from .subsets import k_subsets, members, popcount

VANISH = "⊥"


@dataclass(frozen=True)
class Signature:
    domain: tuple  # masks, ascending mask value
    values: tuple  # +1 / -1 aligned with domain

    def __getitem__(self, mask) -> int:
        return self.as_dict()[mask]

    def as_dict(self) -> dict:
        return dict(zip(self.domain, self.values))

    def __neg__(self):
        return Signature(self.domain, tuple(-v for v in self.values))

    def to_string(self) -> str:
        return "".join("+" if v > 0 else "-" for v in self.values)

    @property
    def negatives(self) -> tuple:
        return tuple(m for m, v in zip(self.domain, self.values) if v < 0)


@dataclass(frozen=True)
class RowColSigns:
    row: int
    flips: int  # mask of columns with chi = -1

    def chi(self, a) -> int:
        return -1 if self.flips >> a & 1 else 1


@dataclass(frozen=True)
class SignedExpansion:
    terms: dict  # mask -> Sigma(I) g_I
    negative: dict  # mask -> g_I over the negative set


def canonical_domain(support):
    return tuple(sorted(support))


def make_signature(support, values) -> Signature:
    """Build from a mask -> sign map (or callable) over ``support``."""
    dom = canonical_domain(support)
    get = values if callable(values) else values.__getitem__
    vals = tuple(1 if get(m) > 0 else -1 for m in dom)
    return Signature(dom, vals)


def identity_signature(table: MinorTable) -> Signature:
    return make_signature(table.support, lambda m: 1)


def signature_from_bits(table: MinorTable, bits: int) -> Signature:
    """Bit j of ``bits`` set means the j-th canonical basis is negative."""
    dom = canonical_domain(table.support)
    return Signature(dom, tuple(-1 if bits >> j & 1 else 1 for j in range(len(dom))))


def parse_signature(text: str, table: MinorTable) -> Signature:
    """Accept the short '+/-' form (length G) or the full form with the vanish symbol."""
    text = text.strip()
    dom = canonical_domain(table.support)
    full = sorted(k_subsets(table.n, table.k))
    if len(text) == len(dom) and set(text) <= {"+", "-"}:
        return Signature(dom, tuple(1 if c == "+" else -1 for c in text))
    if len(text) == len(full) and set(text) <= {"+", "-", VANISH}:
        vals = {}
        for m, c in zip(full, text):
            zero = table.minors[m] == 0
            if zero != (c == VANISH):
                raise ParseError(f"vanishing pattern mismatch at {[a + 1 for a in members(m)]}")
            if not zero:
                vals[m] = 1 if c == "+" else -1
        return Signature(dom, tuple(vals[m] for m in dom))
    raise ParseError(f"signature must have length {len(dom)} over '+-' or {len(full)} over '+-{VANISH}'")


def full_string(sig: Signature, table: MinorTable) -> str:
    vals = sig.as_dict()
    out = []
    for m in sorted(k_subsets(table.n, table.k)):
        if m in vals:
            out.append("+" if vals[m] > 0 else "-")
        else:
            out.append(VANISH)
    return "".join(out)


def induced_signature(table: MinorTable, signs: RowColSigns) -> Signature:
    r, s = signs.row, signs.flips
    return make_signature(table.support, lambda m: r * (-1 if popcount(m & s) % 2 else 1))


def check_domain(support, sig: Signature):
    if set(sig.domain) != set(support) or len(sig.domain) != len(sig.values):
        raise DomainMismatch("signature domain differs from the basis family")


def apply_signature(expansion: TauExpansion, sig: Signature) -> SignedExpansion:
    check_domain(expansion.terms, sig)
    vals = sig.as_dict()
    signed = {m: vals[m] * g for m, g in expansion.terms.items()}
    neg = {m: g for m, g in expansion.terms.items() if vals[m] < 0}
    return SignedExpansion(signed, neg)


def negative_part_value(signed: SignedExpansion, term_values: dict) -> Fraction:
    return sum((term_values[m] for m in signed.negative), Fraction(0))


def extend_total(signs: RowColSigns, n: int, k: int) -> dict:
    r, s = signs.row, signs.flips
    return {m: r * (-1 if popcount(m & s) % 2 else 1) for m in k_subsets(n, k)}

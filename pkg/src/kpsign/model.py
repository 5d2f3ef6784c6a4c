"""Soliton models, maximal minors, tau expansions and the core reduction.

Everything here is exact: entries are ``Fraction`` values and
determinants go through fraction-free (Bareiss) elimination on
integer-scaled rows.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import (
    BadDimension,
    DuplicateKappa,
    InternalInconsistency,
    NonpositiveWeight,
    ParseError,
    RankDeficient,
    SingularPoint,
    ZeroColumn,
    ZeroRow,
)
from .subsets import k_subsets, mask_of, members

_RATIONAL = re.compile(r"-?\d+(?:/\d+)?")


def parse_rational(value) -> Fraction:
    """Parse an exact rational from int, Fraction or a 'p/q' string."""
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL.fullmatch(text):
            raise ParseError(f"not a rational: {value!r}")
        if "/" in text and int(text.split("/")[1]) == 0:
            raise ParseError(f"zero denominator: {value!r}")
        return Fraction(text)
    raise ParseError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# fraction-free linear algebra


def _integer_rows(rows):
    """Scale each row to integers; return (int rows, product of scales)."""
    out = []
    scale = 1
    for row in rows:
        den = math.lcm(*(Fraction(x).denominator for x in row)) if row else 1
        out.append([int(Fraction(x) * den) for x in row])
        scale *= den
    return out, scale


def bareiss_det(rows) -> Fraction:
    """Exact determinant of a square rational matrix."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    m, scale = _integer_rows(rows)
    sign = 1
    prev = 1
    for c in range(n - 1):
        if m[c][c] == 0:
            for r in range(c + 1, n):
                if m[r][c] != 0:
                    m[c], m[r] = m[r], m[c]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        piv = m[c][c]
        for r in range(c + 1, n):
            mr = m[r]
            mc = m[c]
            f = mr[c]
            for j in range(c + 1, n):
                mr[j] = (piv * mr[j] - f * mc[j]) // prev
            mr[c] = 0
        prev = piv
    return Fraction(sign * m[n - 1][n - 1], scale)


def bareiss_rank(rows) -> int:
    """Rank of a rational matrix by fraction-free elimination."""
    if not rows:
        return 0
    m, _ = _integer_rows(rows)
    nr, nc = len(m), len(m[0])
    rank = 0
    prev = 1
    for c in range(nc):
        p = next((r for r in range(rank, nr) if m[r][c] != 0), None)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        piv = m[rank][c]
        for r in range(rank + 1, nr):
            f = m[r][c]
            for j in range(c, nc):
                m[r][j] = (piv * m[r][j] - f * m[rank][j]) // prev
        prev = piv
        rank += 1
        if rank == nr:
            break
    return rank


def rref(rows):
    """Reduced row-echelon form over the rationals; returns (matrix, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    nr = len(m)
    nc = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def solve_inverse(rows):
    """Inverse of a square rational matrix by Gauss-Jordan."""
    n = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(rows)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def vandermonde(kappa, mask) -> Fraction:
    """Product of (kappa_b - kappa_a) over pairs a < b in the subset."""
    idx = members(mask)
    out = Fraction(1)
    for i, a in enumerate(idx):
        for b in idx[i + 1:]:
            out *= kappa[b] - kappa[a]
    return out


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class SolitonModel:
    matrix: tuple
    kappa: tuple
    d: int = 3

    @property
    def k(self) -> int:
        return len(self.matrix)

    @property
    def n(self) -> int:
        return len(self.kappa)

    def to_json(self) -> dict:
        return {
            "matrix": [[format_rational(x) for x in row] for row in self.matrix],
            "kappa": [format_rational(x) for x in self.kappa],
            "d": self.d,
        }


@dataclass(frozen=True)
class MinorTable:
    n: int
    k: int
    kappa: tuple
    minors: dict  # mask -> Fraction, every k-subset
    support: tuple  # masks with nonzero minor, lexicographic order
    pivot: int

    def vdm(self, mask) -> Fraction:
        return vandermonde(self.kappa, mask)

    @property
    def G(self) -> int:
        return len(self.support)

    def with_minor(self, mask, value) -> "MinorTable":
        """Copy with one minor replaced (for audit tests on edited tables)."""
        minors = dict(self.minors)
        minors[mask] = Fraction(value)
        return _table_from_minors(self.n, self.k, self.kappa, minors)


@dataclass(frozen=True)
class TauExpansion:
    n: int
    k: int
    d: int
    kappa: tuple
    terms: dict  # mask -> g_I, only masks in the support

    @property
    def G(self) -> int:
        return len(self.terms)

    def phase_multiset(self, mask):
        return tuple(self.kappa[a] for a in members(mask))


@dataclass(frozen=True)
class ReducedModel:
    core: int
    rowset: tuple
    columns: tuple  # surviving original columns, ascending
    rows: tuple  # surviving original rows, ascending
    matrix: tuple  # reduced matrix a
    kappa: tuple  # kappa restricted to the surviving columns
    constant: Fraction
    hidden_polys: dict = field(default_factory=dict)  # column -> P_beta
    row_sign: int = 1


# ---------------------------------------------------------------------------
# construction


def build_model(matrix, kappa, d=3) -> SolitonModel:
    rows = tuple(tuple(parse_rational(x) for x in row) for row in matrix)
    kap = tuple(parse_rational(x) for x in kappa)
    if not isinstance(d, int) or isinstance(d, bool):
        raise BadDimension(f"d must be an integer, got {d!r}")
    k = len(rows)
    n = len(kap)
    if k == 0 or n == 0:
        raise BadDimension("empty matrix")
    if any(len(r) != n for r in rows):
        raise BadDimension("matrix rows must have one entry per kappa")
    if k > n:
        raise BadDimension(f"k={k} exceeds n={n}")
    if d < 3:
        raise BadDimension(f"d={d} must be at least 3")
    if len(set(kap)) != n:
        raise DuplicateKappa("kappa entries must be pairwise distinct")
    for i, r in enumerate(rows):
        if all(x == 0 for x in r):
            raise ZeroRow(f"row {i + 1} is zero")
    for a in range(n):
        if all(r[a] == 0 for r in rows):
            raise ZeroColumn(f"column {a + 1} is zero")
    rank = bareiss_rank(rows)
    if rank != k:
        raise RankDeficient(f"rank {rank} < k={k}")
    return SolitonModel(rows, kap, d)


def _table_from_minors(n, k, kappa, minors) -> MinorTable:
    order = k_subsets(n, k)
    support = tuple(m for m in order if minors[m] != 0)
    pivot = support[0] if support else 0
    return MinorTable(n, k, tuple(kappa), minors, support, pivot)


def compute_minors(model: SolitonModel) -> MinorTable:
    n, k = model.n, model.k
    minors = {}
    for cols in combinations(range(n), k):
        sub = [[row[c] for c in cols] for row in model.matrix]
        minors[mask_of(cols)] = bareiss_det(sub)
    return _table_from_minors(n, k, model.kappa, minors)


def cauchy_binet(model: SolitonModel, table: MinorTable) -> TauExpansion:
    terms = {m: table.minors[m] * table.vdm(m) for m in table.support}
    return TauExpansion(model.n, model.k, model.d, model.kappa, terms)


# ---------------------------------------------------------------------------
# audits


def plucker_audit(table: MinorTable):
    """Three-term relations over sorted-column minors.

    For H of size k-2 and a<b<c<d outside H:
    D(Hac) D(Hbd) = D(Hab) D(Hcd) + D(Had) D(Hbc).
    Returns a list of (H, a, b, c, d) masks/indices that fail.
    """
    n, k = table.n, table.k
    if k < 2:
        return []
    mn = table.minors
    bad = []
    for hcols in combinations(range(n), k - 2):
        h = mask_of(hcols)
        rest = [x for x in range(n) if not h >> x & 1]
        for a, b, c, d in combinations(rest, 4):
            ba, bb, bc, bd = 1 << a, 1 << b, 1 << c, 1 << d
            lhs = mn[h | ba | bc] * mn[h | bb | bd]
            rhs = mn[h | ba | bb] * mn[h | bc | bd] + mn[h | ba | bd] * mn[h | bb | bc]
            if lhs != rhs:
                bad.append((h, a, b, c, d))
    return bad


def exchange_audit(family):
    """Check the basis exchange axiom; returns (ok, counterexample).

    The counterexample is (I, J, a): no b in J\\I makes I - a + b a member.
    """
    from .errors import EmptyFamily

    fam = set(family)
    if not fam:
        raise EmptyFamily("family is empty")
    sizes = {bin(m).count("1") for m in fam}
    if len(sizes) != 1:
        raise BadDimension("family members differ in size")
    ordered = sorted(fam, key=members)
    for i_mask in ordered:
        for j_mask in ordered:
            for a in members(i_mask & ~j_mask):
                base = i_mask & ~(1 << a)
                if not any(base | (1 << b) in fam for b in members(j_mask & ~i_mask)):
                    return False, (i_mask, j_mask, a)
    return True, None


# ---------------------------------------------------------------------------
# reduction of the core


def reduce_model(model: SolitonModel, table: MinorTable) -> ReducedModel:
    """Strip the columns shared by every basis and renormalize.

    With D the pivot block and A0 the row-reduced matrix, each core
    column is a unit pivot column; removing it together with its row
    leaves a matrix a such that g_I = C * minor_a(I - core) * VdM(I - core).
    """
    n, k = model.n, model.k
    kap = model.kappa
    a0, pivots = rref(model.matrix)
    if mask_of(pivots) != table.pivot:
        raise InternalInconsistency("row-reduced pivots differ from the lex-least basis")
    core = (1 << n) - 1
    for m in table.support:
        core &= m
    rowset = tuple(i for i, p in enumerate(pivots) if core >> p & 1)
    for i in rowset:
        for c in range(n):
            if a0[i][c] != (1 if c == pivots[i] else 0):
                raise InternalInconsistency("core row is not a unit vector")
    core_cols = members(core)
    cols = tuple(c for c in range(n) if not core >> c & 1)
    rows = tuple(i for i in range(k) if i not in rowset)
    hidden = {}
    for b in cols:
        p = Fraction(1)
        for c in core_cols:
            p *= kap[b] - kap[c]
        hidden[b] = p
    a = tuple(
        tuple(a0[i][b] * hidden[b] / hidden[pivots[i]] for b in cols) for i in rows
    )
    # sign of moving the core rows in front of the others
    inversions = sum(sum(1 for j in rows if j < i) for i in rowset)
    row_sign = -1 if inversions % 2 else 1
    det_d = table.minors[table.pivot]
    const = det_d * row_sign * vandermonde(kap, core)
    for i in rows:
        const *= hidden[pivots[i]]
    red_kappa = tuple(kap[b] for b in cols)
    reduced = ReducedModel(core, rowset, cols, rows, a, red_kappa, const, hidden, row_sign)
    _check_reduction(model, table, reduced)
    return reduced


def _check_reduction(model, table, red: ReducedModel):
    pos = {b: j for j, b in enumerate(red.columns)}
    for m in table.support:
        rest = members(m & ~red.core)
        sub = [[row[pos[b]] for b in rest] for row in red.matrix]
        local = mask_of(pos[b] for b in rest)
        rhs = red.constant * bareiss_det(sub) * vandermonde(red.kappa, local)
        lhs = table.minors[m] * table.vdm(m)
        if lhs != rhs:
            raise InternalInconsistency(f"reduction identity fails at {members(m)}")


# ---------------------------------------------------------------------------
# evaluation


def _check_weights(weights, n):
    th = [parse_rational(w) for w in weights]
    if len(th) != n:
        raise BadDimension(f"expected {n} weights, got {len(th)}")
    if any(w <= 0 for w in th):
        raise NonpositiveWeight("weights must be positive")
    return th


def term_weights(expansion: TauExpansion, weights) -> dict:
    """g_I * prod theta over I, per support mask."""
    th = _check_weights(weights, expansion.n)
    out = {}
    for m, g in expansion.terms.items():
        v = g
        for a in members(m):
            v *= th[a]
        out[m] = v
    return out


def eval_tau(expansion: TauExpansion, weights) -> Fraction:
    return sum(term_weights(expansion, weights).values(), Fraction(0))


def phases_at(expansion: TauExpansion, x):
    if len(x) != expansion.d:
        raise BadDimension(f"expected {expansion.d} coordinates")
    kap = [float(c) for c in expansion.kappa]
    return [sum(c ** (r + 1) * float(x[r]) for r in range(len(x))) for c in kap]


def _shifted_sums(expansion, x):
    phi = phases_at(expansion, x)
    kap = [float(c) for c in expansion.kappa]
    logs = []
    for m, g in expansion.terms.items():
        idx = members(m)
        logs.append((m, float(g), sum(phi[a] for a in idx), sum(kap[a] for a in idx)))
    shift = max(e + math.log(abs(g)) for _, g, e, _ in logs)
    t0 = t1 = t2 = absum = 0.0
    for _, g, e, p in logs:
        w = g * math.exp(e - shift)
        t0 += w
        t1 += w * p
        t2 += w * p * p
        absum += abs(w)
    return shift, t0, t1, t2, absum


def eval_tau_at(expansion: TauExpansion, x) -> float:
    shift, t0, _, _, _ = _shifted_sums(expansion, x)
    return t0 * math.exp(shift)


def eval_u_at(expansion: TauExpansion, x, tol=1e-12) -> float:
    """u = 2 (tau tau_xx - tau_x^2) / tau^2 with x the first coordinate."""
    _, t0, t1, t2, absum = _shifted_sums(expansion, x)
    if abs(t0) <= tol * absum:
        raise SingularPoint(f"tau vanishes at {list(x)}")
    return 2.0 * (t0 * t2 - t1 * t1) / (t0 * t0)

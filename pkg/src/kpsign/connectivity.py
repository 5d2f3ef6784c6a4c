"""Exchange graphs, column classes and decomposition into row/column flips."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import MinorTable, ReducedModel
from .signature import RowColSigns, Signature, check_domain, induced_signature
from .subsets import members


@dataclass(frozen=True)
class PathIncidence:
    base: int
    rows: tuple  # members of the base, ascending
    cols: tuple  # non-members, ascending
    entries: tuple  # len(rows) x len(cols) values in {-1, 0, 1}


@dataclass(frozen=True)
class ClassPartition:
    n: int
    classes: tuple  # masks, ordered by minimal member
    sizes: tuple  # k_q = #(pivot & C_q)

    @property
    def P(self) -> int:
        return len(self.classes)

    def class_of(self, a) -> int:
        for q, c in enumerate(self.classes):
            if c >> a & 1:
                return q
        raise IndexError(a)


def _exchange(base, out, inn):
    return base & ~(1 << out) | (1 << inn)


def path_incidence(table: MinorTable, sig: Signature, base=None) -> PathIncidence:
    base = table.pivot if base is None else base
    vals = sig.as_dict()
    rows = members(base)
    cols = tuple(a for a in range(table.n) if not base >> a & 1)
    ent = []
    for b in rows:
        line = []
        for a in cols:
            m = _exchange(base, b, a)
            line.append(vals[base] * vals[m] if m in vals else 0)
        ent.append(tuple(line))
    return PathIncidence(base, rows, cols, tuple(ent))


def _pivot_edges(table: MinorTable):
    """Edges (pivot column, other column, exchanged basis) of X(pivot)."""
    fam = set(table.support)
    base = table.pivot
    out = []
    for b in members(base):
        for a in range(table.n):
            if base >> a & 1:
                continue
            m = _exchange(base, b, a)
            if m in fam:
                out.append((b, a, m))
    return out


def _adjacency(table: MinorTable):
    adj = {a: [] for a in range(table.n)}
    for b, a, m in _pivot_edges(table):
        adj[b].append((a, m))
        adj[a].append((b, m))
    for a in adj:
        adj[a].sort()
    return adj


def classes(table: MinorTable) -> ClassPartition:
    adj = _adjacency(table)
    seen = [False] * table.n
    out = []
    for start in range(table.n):
        if seen[start]:
            continue
        seen[start] = True
        comp = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            comp |= 1 << v
            for w, _ in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        out.append(comp)
    sizes = tuple(bin(c & table.pivot).count("1") for c in out)
    return ClassPartition(table.n, tuple(out), sizes)


def _potentials(table, sig, adj):
    """BFS potentials chi with chi = +1 at each class's minimal pivot.

    Returns (chi, conflict) where conflict is the first non-tree edge whose
    sign disagrees, together with BFS parents for cycle recovery.
    """
    vals = sig.as_dict()
    base = table.pivot
    s0 = vals[base]
    chi = {}
    parent = {}
    conflict = None
    for comp in classes(table).classes:
        root = min(a for a in members(comp) if base >> a & 1) if comp & base else min(members(comp))
        chi[root] = 1
        parent[root] = None
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, m in adj[v]:
                edge = s0 * vals[m]
                if w not in chi:
                    chi[w] = chi[v] * edge
                    parent[w] = v
                    queue.append(w)
                elif chi[w] != chi[v] * edge and conflict is None:
                    conflict = (v, w)
    return chi, parent, conflict


def closed_path_violation(table: MinorTable, sig: Signature):
    """A closed path in X(pivot) with negative sign product, or None.

    The path is returned as a list of columns alternating pivot / non-pivot.
    """
    check_domain(table.support, sig)
    adj = _adjacency(table)
    _, parent, conflict = _potentials(table, sig, adj)
    if conflict is None:
        return None
    v, w = conflict

    def chain(x):
        out = []
        while x is not None:
            out.append(x)
            x = parent[x]
        return out

    pv, pw = chain(v), chain(w)
    common = set(pv) & set(pw)
    left = []
    for x in pv:
        left.append(x)
        if x in common:
            meet = x
            break
    right = []
    for x in pw:
        if x == meet:
            break
        right.append(x)
    return left + right[::-1]


def closed_path_audit(table: MinorTable, sig: Signature) -> bool:
    return closed_path_violation(table, sig) is None


def decompose(table: MinorTable, sig: Signature):
    """Row sign and column flips inducing ``sig``, or None if none exist."""
    check_domain(table.support, sig)
    adj = _adjacency(table)
    chi, _, conflict = _potentials(table, sig, adj)
    if conflict is not None:
        return None
    vals = sig.as_dict()
    r = vals[table.pivot]
    for b in members(table.pivot):
        r *= chi[b]
    flips = 0
    for a in range(table.n):
        if chi.get(a, 1) < 0:
            flips |= 1 << a
    signs = RowColSigns(r, flips)
    if induced_signature(table, signs) != sig:
        return None
    return signs


def decompose_from_entries(reduced: ReducedModel, sigma: dict):
    """Assign row signs rho and column signs chi with sigma(i, a) = rho(i) chi(a).

    ``sigma`` maps (row, column) positions of the nonzero entries of the
    reduced matrix (0-based, reduced coordinates) to +1/-1.  Rows sharing a
    nonzero column are linked; each linked component starts from its least
    row with rho = +1.  Returns (rho, chi) tuples or None.
    """
    a = reduced.matrix
    nr = len(a)
    nc = len(a[0]) if nr else 0
    nz = {(i, j) for i in range(nr) for j in range(nc) if a[i][j] != 0}
    if set(sigma) != nz:
        from .errors import DomainMismatch

        raise DomainMismatch("entry signs must cover exactly the nonzero entries")
    row_cols = {i: [j for j in range(nc) if (i, j) in nz] for i in range(nr)}
    col_rows = {j: [i for i in range(nr) if (i, j) in nz] for j in range(nc)}
    rho = [0] * nr
    chi = [0] * nc
    for h1 in range(nr):
        if rho[h1]:
            continue
        rho[h1] = 1
        queue = deque([h1])
        while queue:
            h = queue.popleft()
            for j in row_cols[h]:
                if not chi[j]:
                    chi[j] = sigma[(h, j)] * rho[h]
                for i in col_rows[j]:
                    if not rho[i]:
                        rho[i] = sigma[(i, j)] * chi[j]
                        queue.append(i)
    chi = [c or 1 for c in chi]
    for (i, j), s in sigma.items():
        if rho[i] * chi[j] != s:
            return None
    return tuple(rho), tuple(chi)


def count_distinct(table: MinorTable) -> int:
    return 2 ** (table.n + 1 - classes(table).P)


def redundancy_family(partition: ClassPartition, h_mask: int):
    out = []
    for sub in range(1 << partition.P):
        u = 0
        for q in range(partition.P):
            if sub >> q & 1:
                u |= partition.classes[q]
        out.append(h_mask ^ u)
    return out


def stratum_multiplicity(n: int, s: int) -> int:
    from math import comb

    from .errors import BadRange

    if not 0 <= s <= n:
        raise BadRange(f"s={s} outside [0, {n}]")
    if 2 * s == n:
        return comb(n, s)
    return 2 * comb(n, s)

import random

import pytest

from factories import block_model, p1_model, p2_model, random_model, small_model, totally_positive_model
from kpsign.connectivity import (
    classes,
    closed_path_audit,
    closed_path_violation,
    count_distinct,
    decompose,
    decompose_from_entries,
    path_incidence,
    redundancy_family,
    stratum_multiplicity,
)
from kpsign.errors import BadRange
from kpsign.kp import ResidualKernel, is_solitonic
from kpsign.model import build_model, cauchy_binet, compute_minors, reduce_model
from kpsign.signature import (
    RowColSigns,
    identity_signature,
    induced_signature,
    make_signature,
    signature_from_bits,
)
from kpsign.subsets import label, mask_of, members, popcount


def brute_distinct(t):
    return {induced_signature(t, RowColSigns(r, S)).values for r in (1, -1) for S in range(1 << t.n)}


class TestClasses:
    def test_p1(self):
        part = classes(compute_minors(p1_model()))
        assert part.P == 3
        assert [label(c) for c in part.classes] == ["123", "45", "67"]
        assert part.sizes == (1, 1, 1)

    def test_generic(self):
        t = compute_minors(totally_positive_model(random.Random(0), 6, 3))
        assert classes(t).P == 1

    def test_core_model(self):
        part = classes(compute_minors(build_model([[1, 0, 0], [0, 1, 1]], [0, 1, 2])))
        assert [label(c) for c in part.classes] == ["1", "23"]

    def test_class_size_invariant(self):
        rng = random.Random(1)
        for _ in range(20):
            t = compute_minors(block_model(rng, [(1, 2), (2, 3)]) if rng.random() < 0.5 else random_model(rng, 6, 3))
            part = classes(t)
            for c, kq in zip(part.classes, part.sizes):
                assert kq >= 1
                assert all(popcount(I & c) == kq for I in t.support)

    def test_path_incidence(self):
        t = compute_minors(build_model([[1, 0, 0], [0, 1, 1]], [0, 1, 2]))
        x = path_incidence(t, identity_signature(t))
        assert x.rows == (0, 1) and x.cols == (2,)
        assert x.entries == ((0,), (1,))


class TestClosedPaths:
    def test_solitonic_true(self):
        t = compute_minors(p1_model())
        for S in range(0, 128, 5):
            assert closed_path_audit(t, induced_signature(t, RowColSigns(1, S)))

    def test_single_flip_cycle(self):
        t = compute_minors(totally_positive_model(random.Random(2), 4, 2))
        flipped = mask_of([0, 2])  # one exchange away from the pivot
        sig = make_signature(t.support, lambda x: -1 if x == flipped else 1)
        cyc = closed_path_violation(t, sig)
        assert cyc is not None and len(cyc) == 4
        base = t.pivot
        # product of entry signs along the alternating 4-cycle is -1
        vals = sig.as_dict()
        prod = 1
        for i in range(4):
            u, v = cyc[i], cyc[(i + 1) % 4]
            b, a = (u, v) if base >> u & 1 else (v, u)
            prod *= vals[base] * vals[base & ~(1 << b) | (1 << a)]
        assert prod == -1

    def test_single_row(self):
        t = compute_minors(build_model([[1, -2, 3]], [0, 1, 2]))
        for bits in range(8):
            assert closed_path_audit(t, make_signature(t.support, lambda x: -1 if x & bits else 1))


class TestDecompose:
    def test_identity(self):
        t = compute_minors(p1_model())
        assert decompose(t, identity_signature(t)) == RowColSigns(1, 0)

    def test_round_trip_small(self):
        t = compute_minors(small_model())
        got = decompose(t, induced_signature(t, RowColSigns(1, 0b100)))
        assert got.flips in (0b0100, 0b1011)

    def test_single_flip_absent(self):
        t = compute_minors(totally_positive_model(random.Random(4), 5, 2))
        for mask in t.support:
            assert decompose(t, make_signature(t.support, lambda x: -1 if x == mask else 1)) is None

    def test_ambiguity_is_union_of_classes(self):
        rng = random.Random(5)
        for _ in range(10):
            t = compute_minors(block_model(rng, [(1, 2), (1, 2), (1, 1)]))
            part = classes(t)
            unions = {sum(c for q, c in enumerate(part.classes) if sub >> q & 1) for sub in range(1 << part.P)}
            seen = {}
            for S in range(1 << t.n):
                for r in (1, -1):
                    key = induced_signature(t, RowColSigns(r, S)).values
                    if key in seen:
                        assert seen[key] ^ S in unions
                    else:
                        seen[key] = S
            for key, S in seen.items():
                sig = induced_signature(t, RowColSigns(1, S))
                d = decompose(t, sig)
                assert induced_signature(t, d) == sig


class TestEntrySigns:
    def reduced(self, rows=((1, 0, 2, -1, 0), (0, 1, 3, 0, 5))):
        m = build_model(rows, range(len(rows[0])))
        return reduce_model(m, compute_minors(m))

    def sign_of(self, x):
        return 1 if x > 0 else -1

    def test_self(self):
        r = self.reduced()
        sigma = {(i, j): self.sign_of(v) for i, row in enumerate(r.matrix) for j, v in enumerate(row) if v}
        rho, chi = decompose_from_entries(r, sigma)
        assert all(rho[i] * chi[j] == s for (i, j), s in sigma.items())

    def test_flip_column(self):
        r = self.reduced()
        sigma = {(i, j): self.sign_of(v) for i, row in enumerate(r.matrix) for j, v in enumerate(row) if v}
        base = decompose_from_entries(r, sigma)
        flipped = {(i, j): -s if j == 2 else s for (i, j), s in sigma.items()}
        rho, chi = decompose_from_entries(r, flipped)
        assert rho == base[0]
        assert [c * b for c, b in zip(chi, base[1])] == [1, 1, -1, 1, 1]

    def test_odd_square(self):
        r = self.reduced(((1, 0, 2, -1), (0, 1, 3, 5)))
        sigma = {(i, j): 1 for i, row in enumerate(r.matrix) for j, v in enumerate(row) if v}
        assert decompose_from_entries(r, sigma) == ((1, 1), (1, 1, 1, 1))
        sigma[(1, 3)] = -sigma[(1, 3)]  # columns 2, 3 form an all-nonzero 2x2 block
        assert decompose_from_entries(r, sigma) is None


class TestCounting:
    def test_p1(self):
        assert count_distinct(compute_minors(p1_model())) == 32

    def test_generic(self):
        for n, k in ((4, 2), (5, 3), (6, 1)):
            t = compute_minors(totally_positive_model(random.Random(n), n, k))
            assert count_distinct(t) == 2 ** n

    def test_against_brute_force(self):
        rng = random.Random(6)
        for _ in range(25):
            n = rng.choice([3, 4, 5])
            m = random_model(rng, n, rng.choice([1, 2, 3][: n - 1]), entries=[0, 0, 0, 1, -1, 2])
            t = compute_minors(m)
            assert count_distinct(t) == len(brute_distinct(t))
            assert t.G + classes(t).P >= n + 1

    def test_redundancy(self):
        part = classes(compute_minors(p1_model()))
        fam = redundancy_family(part, 0)
        assert len(fam) == 8 and sorted(label(x) for x in fam if x)[0] == "123"
        t = compute_minors(totally_positive_model(random.Random(7), 4, 2))
        assert sorted(redundancy_family(classes(t), 0)) == [0, 15]

    def test_redundancy_partition(self):
        rng = random.Random(8)
        for _ in range(5):
            t = compute_minors(block_model(rng, [(1, 2), (1, 3)]))
            part = classes(t)
            seen = set()
            sizes = set()
            for H in range(1 << t.n):
                fam = frozenset(redundancy_family(part, H))
                sizes.add(len(fam))
                if H == min(fam):
                    assert not any(fam & s for s in seen)
                    seen.add(fam)
            assert sizes == {2 ** part.P}
            assert sum(len(f) for f in seen) == 2 ** t.n

    def test_multiplicity(self):
        assert stratum_multiplicity(4, 1) == 8
        assert stratum_multiplicity(4, 2) == 6
        for n in range(1, 10):
            assert sum(stratum_multiplicity(n, s) for s in range(n // 2 + 1)) == 2 ** n
        with pytest.raises(BadRange):
            stratum_multiplicity(3, 4)

    def test_multiplicity_brute(self):
        for n, k in ((4, 2), (5, 2), (5, 3)):
            t = compute_minors(totally_positive_model(random.Random(n * k), n, k))
            for s in range(n + 1):
                got = {induced_signature(t, RowColSigns(r, S)).values
                       for r in (1, -1) for S in range(1 << n) if popcount(S) == s}
                assert len(got) == stratum_multiplicity(n, s)


def test_p2_structure():
    t = compute_minors(p2_model())
    part = classes(t)
    assert part.P == 3 and t.G == 54
    e = cauchy_binet(p2_model(), t)
    assert is_solitonic(e, induced_signature(t, RowColSigns(1, mask_of([0, 4]))))
    assert members(part.classes[0]) == (0, 1, 2, 3)


def entry_signs_from_signature(t, red, sig):
    """sigma(i, b) = Sigma(V) Sigma(V with its i-th reduced pivot swapped for b)."""
    vals = sig.as_dict()
    piv = members(t.pivot)
    out = {}
    for ri, i in enumerate(red.rows):
        for cj, b in enumerate(red.columns):
            if red.matrix[ri][cj] == 0:
                continue
            if b == piv[i]:
                out[(ri, cj)] = 1
            else:
                out[(ri, cj)] = vals[t.pivot] * vals[t.pivot & ~(1 << piv[i]) | (1 << b)]
    return out


def test_entry_signs_track_solitonic_signatures():
    rng = random.Random(12)
    for _ in range(15):
        m = random_model(rng, 5, rng.choice([2, 3]))
        t = compute_minors(m)
        red = reduce_model(m, t)
        ker = ResidualKernel(cauchy_binet(m, t))
        for bits in range(1 << t.G):
            sig = signature_from_bits(t, bits)
            got = decompose_from_entries(red, entry_signs_from_signature(t, red, sig))
            assert (got is not None) == closed_path_audit(t, sig)
            if ker.residual(sig).is_zero:
                assert got is not None

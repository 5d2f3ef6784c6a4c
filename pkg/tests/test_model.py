import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from factories import p1_model, random_model, random_weights, small_model, totally_positive_model
from kpsign.errors import (
    BadDimension,
    DuplicateKappa,
    NonpositiveWeight,
    ParseError,
    RankDeficient,
    SingularPoint,
    ZeroColumn,
    ZeroRow,
)
from kpsign.model import (
    bareiss_det,
    build_model,
    cauchy_binet,
    compute_minors,
    eval_tau,
    eval_tau_at,
    eval_u_at,
    exchange_audit,
    format_rational,
    parse_rational,
    plucker_audit,
    reduce_model,
)
from kpsign.subsets import label, mask_of, members


def by_label(d):
    return {label(m): v for m, v in d.items()}


class TestRationals:
    def test_parse(self):
        assert parse_rational("-3/6") == Fraction(-1, 2)
        assert parse_rational(4) == 4
        for bad in ("1/0", "+1", "1.5", "a", True):
            with pytest.raises(ParseError):
                parse_rational(bad)

    def test_format_roundtrip(self):
        for q in (Fraction(-4, 6), Fraction(5), Fraction(0)):
            assert parse_rational(format_rational(q)) == q
        assert format_rational(Fraction(2, -4)) == "-1/2"


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4),
                         min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_sympy(rows):
    assert bareiss_det(rows) == Fraction(str(sympy.Matrix(rows).det()))


class TestBuildModel:
    def test_p1_valid(self):
        m = p1_model()
        assert (m.k, m.n, m.d) == (3, 7, 3)

    def test_errors(self):
        with pytest.raises(RankDeficient):
            build_model([[1, 1], [1, 1]], [0, 1])
        with pytest.raises(DuplicateKappa):
            build_model([[1, 2]], [1, 1])
        with pytest.raises(ZeroRow):
            build_model([[1, 2], [0, 0]], [0, 1])
        with pytest.raises(ZeroColumn):
            build_model([[1, 0]], [0, 1])
        with pytest.raises(BadDimension):
            build_model([[1], [2]], [0])
        with pytest.raises(BadDimension):
            build_model([[1, 2]], [0, 1], d=2)

    def test_small_minors(self):
        t = compute_minors(small_model())
        assert by_label(t.minors) == {"12": 1, "13": 1, "14": 1, "23": 1, "24": 2, "34": 1}


class TestMinors:
    def test_p1(self):
        t = compute_minors(p1_model())
        assert t.G == 12
        assert label(t.pivot) == "146"

    def test_square(self):
        m = build_model([[2, 1], [1, 3]], [0, 1])
        t = compute_minors(m)
        assert list(t.minors.values()) == [5]

    def test_against_sympy(self):
        rng = random.Random(3)
        for _ in range(10):
            m = random_model(rng, 6, 3)
            t = compute_minors(m)
            mat = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in m.matrix])
            for mask, v in t.minors.items():
                assert Fraction(str(mat[:, list(members(mask))].det())) == v

    def test_vdm(self):
        t = compute_minors(small_model())
        assert t.vdm(mask_of([0, 2, 3])) == (2 - 0) * (3 - 0) * (3 - 2)


class TestCauchyBinet:
    def test_small_terms(self):
        m = small_model()
        e = cauchy_binet(m, compute_minors(m))
        assert by_label(e.terms) == {"12": 1, "13": 2, "14": 3, "23": 1, "24": 4, "34": 1}

    def test_single_row(self):
        m = build_model([[1, 1]], [0, 1])
        assert list(cauchy_binet(m, compute_minors(m)).terms.values()) == [1, 1]

    def test_p1_positive(self):
        m = p1_model()
        e = cauchy_binet(m, compute_minors(m))
        assert e.G == 12 and all(g > 0 for g in e.terms.values())

    def test_expansion_equals_determinant(self):
        rng = random.Random(5)
        for _ in range(20):
            m = random_model(rng, 5, rng.choice([2, 3]))
            th = random_weights(rng, m.n)
            e = cauchy_binet(m, compute_minors(m))
            kmat = [[c ** j for j in range(m.k)] for c in m.kappa]
            prod = [[sum(m.matrix[i][a] * th[a] * kmat[a][j] for a in range(m.n)) for j in range(m.k)]
                    for i in range(m.k)]
            assert eval_tau(e, th) == bareiss_det(prod)

    def test_row_gauge(self):
        rng = random.Random(7)
        for _ in range(10):
            m = random_model(rng, 5, 2)
            g = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
            det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
            if det == 0:
                continue
            rows = [[sum(g[i][r] * m.matrix[r][a] for r in range(2)) for a in range(m.n)] for i in range(2)]
            m2 = build_model(rows, m.kappa)
            e1 = cauchy_binet(m, compute_minors(m)).terms
            e2 = cauchy_binet(m2, compute_minors(m2)).terms
            assert e1.keys() == e2.keys()
            assert all(e2[x] == det * e1[x] for x in e1)


class TestAudits:
    def test_computed_tables_clean(self):
        rng = random.Random(11)
        for _ in range(20):
            t = compute_minors(random_model(rng, 6, rng.choice([2, 3, 4])))
            assert plucker_audit(t) == []
            assert exchange_audit(t.support)[0]

    def test_negated_minor(self):
        t = compute_minors(p1_model())
        assert plucker_audit(t.with_minor(t.pivot, -t.minors[t.pivot]))

    def test_zeroed_minor_on_positive_model(self):
        t = compute_minors(totally_positive_model(random.Random(1), 4, 2))
        assert all(v > 0 for v in t.minors.values())
        bad = t.with_minor(mask_of([0, 2]), 0)
        assert plucker_audit(bad)

    def test_exchange(self):
        ok, _ = exchange_audit(compute_minors(p1_model()).support)
        assert ok
        ok, witness = exchange_audit([mask_of([0, 1]), mask_of([2, 3])])
        assert not ok and witness[2] in (0, 1, 2, 3)
        from kpsign.subsets import k_subsets

        assert exchange_audit(k_subsets(5, 2))[0]


class TestReduction:
    def test_p1_no_core(self):
        m = p1_model()
        r = reduce_model(m, compute_minors(m))
        assert r.core == 0 and r.rowset == ()

    def test_core_example(self):
        m = build_model([[1, 0, 0], [0, 1, 1]], [0, 1, 2])
        r = reduce_model(m, compute_minors(m))
        assert members(r.core) == (0,)
        assert r.rowset == (0,)
        assert len(r.matrix) == 1 and len(r.matrix[0]) == 2

    def test_single_row_no_core(self):
        m = build_model([[1, 2, -1]], [0, 1, 5])
        assert reduce_model(m, compute_minors(m)).core == 0

    def test_random_with_cores(self):
        # block models with 1x1 blocks force core columns
        rng = random.Random(13)
        for _ in range(15):
            n, k = 6, 3
            m = random_model(rng, n, k)
            rows = [list(r) + [0] for r in m.matrix] + [[0] * n + [rng.randint(1, 4)]]
            mm = build_model(rows, list(m.kappa) + [Fraction(100)])
            r = reduce_model(mm, compute_minors(mm))  # raises on identity failure
            assert r.core >> n & 1


class TestEvaluation:
    def test_small_sum(self):
        m = small_model()
        assert eval_tau(cauchy_binet(m, compute_minors(m)), [1, 1, 1, 1]) == 12

    def test_one_row(self):
        m = build_model([[1, 1]], [0, 1])
        assert eval_tau(cauchy_binet(m, compute_minors(m)), [2, 3]) == 5

    def test_homogeneity(self):
        rng = random.Random(17)
        m = random_model(rng, 5, 3)
        e = cauchy_binet(m, compute_minors(m))
        th = random_weights(rng, 5)
        lam = Fraction(7, 3)
        assert eval_tau(e, [lam * x for x in th]) == lam ** 3 * eval_tau(e, th)

    def test_nonpositive(self):
        m = small_model()
        with pytest.raises(NonpositiveWeight):
            eval_tau(cauchy_binet(m, compute_minors(m)), [1, 0, 1, 1])

    def test_u_constant_for_single_term(self):
        m = build_model([[1]], [Fraction(3, 2)])
        e = cauchy_binet(m, compute_minors(m))
        assert eval_u_at(e, [0.3, -1.0, 2.0]) == pytest.approx(0.0, abs=1e-12)

    def test_one_soliton_bump(self):
        k1, k2 = Fraction(-1), Fraction(2)
        m = build_model([[1, 1]], [k1, k2])
        e = cauchy_binet(m, compute_minors(m))
        for x in (-3.0, -0.5, 0.0, 0.7, 2.5):
            pt = [x, 0.2, -0.1]
            phi = [float(c) * pt[0] + float(c) ** 2 * pt[1] + float(c) ** 3 * pt[2] for c in (k1, k2)]
            expect = 0.5 * float(k1 - k2) ** 2 / math.cosh((phi[0] - phi[1]) / 2) ** 2
            assert eval_u_at(e, pt) == pytest.approx(expect, rel=1e-10)
        assert abs(eval_u_at(e, [60.0, 0.0, 0.0])) < 1e-20
        assert abs(eval_u_at(e, [-60.0, 0.0, 0.0])) < 1e-20

    def test_point_matches_weight_mode(self):
        rng = random.Random(19)
        for _ in range(100):
            m = random_model(rng, 5, rng.choice([1, 2, 3]))
            e = cauchy_binet(m, compute_minors(m))
            x = [rng.uniform(-0.3, 0.3) for _ in range(3)]
            phi = [sum(float(c) ** (r + 1) * x[r] for r in range(3)) for c in m.kappa]
            th = [Fraction(math.exp(p)) for p in phi]
            exact = float(eval_tau(e, th))
            approx = eval_tau_at(e, x)
            scale = sum(abs(float(g)) for g in e.terms.values()) * max(float(t) for t in th) ** m.k
            assert abs(approx - exact) <= 1e-10 * max(abs(exact), 1e-300) or abs(approx - exact) <= 1e-12 * scale

    def test_singular_point(self):
        m = build_model([[1, -1]], [0, 1])
        e = cauchy_binet(m, compute_minors(m))
        with pytest.raises(SingularPoint):
            eval_u_at(e, [0.0, 0.0, 0.0])

import numpy as np
import pytest
from scipy.signal import convolve2d

from corrdyn.algebra import (
    AlgebraError,
    BiPoly,
    UniPoly,
    batched_projective_roots,
    discriminant,
    resultant,
    resultant_chain,
    resultant_is_zero,
    roots,
    squarefree_part,
    univariate_content_roots,
)


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def poly_from_roots(rts):
    c = np.array([1.0 + 0j])
    for r in rts:
        c = np.convolve(c, np.array([-r, 1.0 + 0j]))
    return UniPoly(c)


class TestRoots:
    def test_quadratic_units(self):
        got = roots(UniPoly([1, 0, 1]))
        vals = sorted((round(r.real, 9), round(r.imag, 9)) for r, _ in got)
        assert vals == [(0.0, -1.0), (0.0, 1.0)]
        assert all(m == 1 for _, m in got)

    def test_double_root(self):
        got = roots(UniPoly([4, -4, 1]))
        assert len(got) == 1
        r, m = got[0]
        assert m == 2
        assert abs(r - 2.0) < 1e-6

    def test_seeded_degree8_residuals(self):
        g = _rng(81)
        p = UniPoly(g.normal(size=9) + 1j * g.normal(size=9))
        got = roots(p, tol=1e-10)
        worst = max(abs(p(r)) / p.scale() for r, _ in got)
        assert worst < 1e-10

    def test_multiplicity_sum_always_matches_degree(self):
        for seed in range(20):
            g = _rng(seed)
            deg = int(g.integers(2, 12))
            p = UniPoly(g.normal(size=deg + 1) + 1j * g.normal(size=deg + 1))
            got = roots(p)
            assert sum(m for _, m in got) == p.degree

    def test_zero_polynomial_rejected(self):
        with pytest.raises(AlgebraError, match="zero"):
            roots(UniPoly([0.0]))


class TestResultant:
    def test_chain_squaring(self):
        # eliminating the middle variable from y - x^2 and z - y^2 gives z - x^4
        p = BiPoly([[0, 1], [0, 0], [-1, 0]])
        R = resultant_chain(p, p).normalized()
        expected = np.zeros((5, 2), dtype=complex)
        expected[0, 1] = 1.0
        expected[4, 0] = -1.0
        got = R.coeffs * (expected[0, 1] / R.coeffs[0, 1])
        assert np.max(np.abs(got - expected)) < 1e-10

    def test_linear_pair_2x2(self):
        r = resultant(BiPoly([[0, 1], [-1, 0]]), BiPoly([[0, 1], [1, 0]]), "y")
        # 2x up to rounding
        assert r.degree == 1
        assert abs(r.coeffs[0]) < 1e-12
        assert abs(r.coeffs[1] - 2.0) < 1e-12

    def test_chain_linear_pair_branch_products(self):
        lin = BiPoly([[0, 0, 1], [0, -5, 0], [6, 0, 0]])   # (y-2x)(y-3x)
        R = resultant_chain(lin, lin).normalized()
        prod = np.array([[1.0 + 0j]])
        for rr in (4, 6, 6, 9):
            prod = convolve2d(prod, np.array([[0, 1.0], [-rr, 0]]))
        prod = prod / np.max(np.abs(prod))
        k = np.unravel_index(np.argmax(np.abs(prod)), prod.shape)
        got = R.coeffs * (prod[k] / R.coeffs[k])
        assert np.max(np.abs(got - prod)) < 1e-10

    def test_degree_bound_random(self):
        for seed in range(10):
            g = _rng(100 + seed)
            p = BiPoly(g.normal(size=(3, 3)) + 1j * g.normal(size=(3, 3)))
            q = BiPoly(g.normal(size=(2, 3)) + 1j * g.normal(size=(2, 3)))
            r = resultant(p, q, "y")
            assert r.degree <= p.deg_x * q.deg_y + q.deg_x * p.deg_y

    def test_coprime_vs_common_factor(self):
        g = _rng(7)
        common = BiPoly(g.normal(size=(2, 2)) + 1j * g.normal(size=(2, 2)))
        a = BiPoly(g.normal(size=(2, 2)) + 1j * g.normal(size=(2, 2)))
        b = BiPoly(g.normal(size=(2, 2)) + 1j * g.normal(size=(2, 2)))
        pa = BiPoly(convolve2d(common.coeffs, a.coeffs))
        pb = BiPoly(convolve2d(common.coeffs, b.coeffs))
        assert resultant_is_zero(resultant(pa, pb, "y"))
        assert not resultant_is_zero(resultant(a, b, "y"))

    def test_degenerate_leading_coefficient(self):
        with pytest.raises(AlgebraError):
            resultant(BiPoly([[1.0], [1.0]]), BiPoly([[0, 1], [1, 0]]), "y")


class TestDiscriminant:
    def test_parabola(self):
        d = discriminant(BiPoly([[0, 1], [0, 0], [-1, 0]]), "x")
        # constant * y: vanishes exactly at y = 0
        assert d.degree == 1
        assert abs(d.coeffs[0]) < 1e-12

    def test_degree_too_small(self):
        with pytest.raises(AlgebraError, match="ramification"):
            discriminant(BiPoly([[0, 1], [0, 0], [-1, 0]]), "y")

    def test_component_crossing_locus(self):
        # (y-2x)(y-3x): x-discriminant vanishes (to second order) only at y = 0
        d = discriminant(BiPoly([[0, 0, 1], [0, -5, 0], [6, 0, 0]]), "x")
        got = roots(d, tol=1e-8)
        assert sum(m for _, m in got) == d.degree
        assert all(abs(r) < 1e-8 for r, _ in got)


class TestSquarefree:
    def test_planted_double(self):
        p = poly_from_roots([1.0, 1.0, -1.0])
        sf = squarefree_part(p)
        got = sorted(r.real for r, _ in roots(sf.poly))
        assert np.allclose(got, [-1.0, 1.0], atol=1e-8)

    def test_cube(self):
        sf = squarefree_part(UniPoly([0, 0, 0, 1.0]))
        assert sf.poly.degree == 1

    def test_seeded_double_roots_preserved(self):
        g = _rng(5)
        base = [complex(g.normal(), g.normal()) for _ in range(4)]
        p = poly_from_roots(base + base[:2])
        sf = squarefree_part(p)
        want = sorted((round(r.real, 5), round(r.imag, 5)) for r in base)
        got = sorted((round(r.real, 5), round(r.imag, 5)) for r, _ in roots(sf.poly, tol=1e-8))
        assert got == want
        worst = max(abs(p(r)) / p.scale() for r, _ in roots(sf.poly, tol=1e-8))
        assert worst < 1e-8


class TestBatchedRoots:
    def test_degree_drop_pads_infinity(self):
        rows = np.array([[1.0, 0.0, 0.0],     # constant: both roots at infinity
                         [-1.0, 0.0, 1.0],    # z^2 = 1
                         [2.0, 1.0, 0.0]])    # z = -2, one root at infinity
        vals, degen = batched_projective_roots(rows.astype(complex))
        assert not degen.any()
        assert np.isinf(vals[0]).all()
        assert np.allclose(sorted(vals[1].real), [-1, 1])
        finite = vals[2][np.isfinite(vals[2])]
        assert len(finite) == 1 and abs(finite[0] + 2.0) < 1e-12

    def test_degenerate_row_flagged(self):
        vals, degen = batched_projective_roots(np.zeros((1, 3), dtype=complex))
        assert degen[0]

    def test_huge_root_accuracy(self):
        # (z - 1e7)(z - 2) has a root near the inverted chart
        rows = np.array([[2e7, -(1e7 + 2.0), 1.0]], dtype=complex)
        vals, _ = batched_projective_roots(rows)
        assert min(abs(vals[0] - 1e7)) / 1e7 < 1e-9


class TestContent:
    def test_planted_fiber_factor(self):
        # x * (y - x) = xy - x^2 has content root x = 0
        c = np.array([[0, 0], [0, 1], [-1, 0]], dtype=complex)
        found = univariate_content_roots(c, axis=0)
        assert len(found) == 1
        r, m = found[0]
        assert abs(r) < 1e-10 and m == 1

    def test_clean_graph_has_no_content(self):
        c = np.array([[-1, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=complex)
        assert univariate_content_roots(c, axis=0) == []
        assert univariate_content_roots(c, axis=1) == []

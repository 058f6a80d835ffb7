import numpy as np
import pytest

from corrdyn import gallery, sphere
from corrdyn.algebra import BiPoly
from corrdyn.correspondence import (
    CompositionDegenerateError,
    CorrespondenceError,
    adjoint,
    compose,
    conjugate,
    content_hash,
    critical_orbit_report,
    critical_values,
    delta_bound,
    fiber_points,
    from_bipoly,
    from_text,
    iterate,
    to_text,
)
from corrdyn.transport import sample_branch_path


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def _ext(v):
    return "inf" if (v.chart == 1 and v.coord == 0) else v.as_extended()


class TestValidation:
    def test_degrees_read_off(self):
        f = from_bipoly(BiPoly([[-1, 0, 1], [0, 0, 0], [-1, 0, 0]]))
        assert (f.d1, f.d2) == (2, 2)
        g = gallery.linear_pair()
        assert (g.d1, g.d2) == (2, 2)

    def test_fiber_factor_rejected(self):
        # x * (y - x) = x y - x^2
        with pytest.raises(CorrespondenceError, match="fiber"):
            from_bipoly(BiPoly([[0, 0], [0, 1], [-1, 0]]))

    def test_one_variable_polynomial_rejected(self):
        with pytest.raises(CorrespondenceError, match="fiber"):
            from_bipoly(BiPoly([[0, 1, 1]]))

    def test_zero_rejected(self):
        with pytest.raises(CorrespondenceError, match="zero"):
            from_bipoly(BiPoly([[0.0]]))


class TestAdjoint:
    def test_squaring(self, sq):
        a = adjoint(sq)
        assert (a.d1, a.d2) == (sq.d2, sq.d1)
        assert np.array_equal(a.P.coeffs, sq.P.coeffs.T)

    def test_involution_exact(self, hyp):
        assert np.array_equal(adjoint(adjoint(hyp)).P.coeffs, hyp.P.coeffs)

    def test_self_adjoint_example(self, self_adjoint):
        a = adjoint(self_adjoint)
        assert np.array_equal(a.P.coeffs, self_adjoint.P.coeffs)


class TestCompose:
    def test_squaring_composition(self, sq):
        c = compose(sq, sq)
        assert (c.d1, c.d2) == (1, 4)
        got = c.P.normalized().coeffs
        expected = np.zeros((5, 2), dtype=complex)
        expected[0, 1] = 1.0
        expected[4, 0] = -1.0
        got = got * (expected[0, 1] / got[0, 1])
        assert np.max(np.abs(got - expected)) < 1e-10

    def test_identity_law(self, hyp):
        ident = from_bipoly(BiPoly([[0, 1], [-1, 0]]))
        for c in (compose(hyp, ident), compose(ident, hyp)):
            got = c.P.coeffs * (hyp.P.coeffs[0, 2] / c.P.coeffs[0, 2])
            assert np.max(np.abs(got - hyp.P.coeffs)) < 1e-10

    def test_linear_pair_self_composition(self, lin):
        c = compose(lin, lin)
        assert (c.d1, c.d2) == (4, 4)
        vals, _ = fiber_points(c, [0], [1.0], "forward")
        got = sorted(vals[0].real)
        assert np.allclose(got, [4, 6, 6, 9], atol=1e-5)

    def test_degree_law_seeded(self):
        for seed in range(25):
            f = gallery.random_correspondence((2, 2), seed=3000 + seed)
            g = gallery.random_correspondence((2, 2), seed=4000 + seed)
            c = compose(f, g)
            assert c.d1 == f.d1 * g.d1 and c.d2 == f.d2 * g.d2

    def test_adjoint_antihomomorphism(self):
        f = gallery.random_correspondence((2, 2), seed=11)
        g = gallery.random_correspondence((2, 2), seed=12)
        lhs = adjoint(compose(f, g)).P.normalized().coeffs
        rhs = compose(adjoint(g), adjoint(f)).P.normalized().coeffs
        k = np.unravel_index(np.argmax(np.abs(rhs)), rhs.shape)
        lhs = lhs * (rhs[k] / lhs[k])
        assert np.max(np.abs(lhs - rhs)) < 1e-9


class TestIterate:
    def test_map_case(self, sq):
        it = iterate(sq, 3)
        assert (it.d1, it.d2) == (1, 8)

    def test_identity_at_one(self, hyp):
        assert iterate(hyp, 1) is hyp

    def test_linear_pair_square_fiber(self, lin):
        it = iterate(lin, 2)
        assert it.P.bidegree == (4, 4)
        vals, _ = fiber_points(it, [0], [1.0], "forward")
        assert np.allclose(sorted(vals[0].real), [4, 6, 6, 9], atol=1e-5)

    def test_cap(self, lin):
        with pytest.raises(CorrespondenceError, match="cap"):
            iterate(lin, 13)   # 2^13 > 4096


class TestCriticalValues:
    def test_squaring(self, sq):
        data = critical_values(sq)
        assert len(data.b2) == 2 and data.includes_infinity("b2")
        affine = [v for v in data.b2 if not v.is_infinity]
        assert len(affine) == 1 and abs(affine[0].as_extended()) < 1e-8
        assert all(v.kind == "ramification" for v in data.b2)
        assert data.b1 == ()

    def test_linear_pair_crossings(self, lin):
        data = critical_values(lin)
        assert len(data.b2) == 2 and data.includes_infinity("b2")
        assert all(v.kind == "component-crossing" for v in data.b2)

    def test_hyperbola(self, hyp):
        data = critical_values(hyp)
        b2_affine = sorted(round(v.as_extended().real, 6) for v in data.b2 if not v.is_infinity)
        b1_affine = sorted(round(v.as_extended().imag, 6) for v in data.b1 if not v.is_infinity)
        assert b2_affine == [-1.0, 1.0]
        assert b1_affine == [-1.0, 1.0]
        assert all(v.kind == "ramification" for v in data.b2 if not v.is_infinity)
        # the double point at infinity is a crossing of two smooth germs
        inf2 = [v for v in data.b2 if v.is_infinity]
        assert len(inf2) == 1 and inf2[0].kind == "component-crossing"

    def test_witnesses_lie_on_the_graph(self, hyp):
        from corrdyn.correspondence import graph_residual
        data = critical_values(hyp)
        for v in data.b2:
            res = graph_residual(hyp, (v.witness_chart, v.witness_coord), (v.chart, v.coord))
            assert res < 1e-6


class TestCriticalOrbits:
    def test_squaring_fixed_critical_value(self, sq):
        rep = critical_orbit_report(sq, horizon=8)
        zero = [e for e in rep.entries if not e.value.is_infinity][0]
        assert zero.periodic_detected and zero.certified
        assert rep.hypothesis_unverified   # 0 -> 0 is a certified cycle

    def test_escaping_orbit(self):
        # critical value of y - x^2 - 1 is 1; orbit 1 -> 2 -> 5 -> 26 escapes
        f = from_bipoly(BiPoly([[-1, 1], [0, 0], [-1, 0]]))
        rep = critical_orbit_report(f, horizon=10)
        one = [e for e in rep.entries if not e.value.is_infinity][0]
        assert not one.periodic_detected
        assert one.min_return_distance > 0.1

    def test_planted_cycle_detected(self):
        rep = critical_orbit_report(gallery.basilica_map(), horizon=6)
        mone = [e for e in rep.entries if not e.value.is_infinity][0]
        assert mone.periodic_detected and mone.certified
        assert mone.returning_path is not None

    def test_hyperbola_hypothesis_holds(self, hyp):
        rep = critical_orbit_report(hyp, horizon=10)
        assert not rep.hypothesis_unverified
        # crossings at infinity are reported but do not block the hypothesis
        assert any(e.value.kind == "component-crossing" and e.certified
                   for e in rep.entries)


class TestDeltaBound:
    def test_squaring(self, sq):
        assert delta_bound(sq) == 4

    def test_unramified_is_one(self):
        # a single affine-linear graph has no critical values at all
        f = from_bipoly(BiPoly([[1, 1], [-1, 0]]))    # y = x - 1
        data = critical_values(f)
        assert len(data.b2) == 0
        assert delta_bound(f) == 1

    def test_hyperbola_counts_infinity(self, hyp):
        assert delta_bound(hyp) == 2 ** 3   # {+1, -1, inf}


class TestInvariants:
    def test_fiber_cardinality(self, hyp):
        g = _rng(50)
        y = g.normal(size=50) + 1j * g.normal(size=50)
        ch, w = sphere.to_chart(y)
        vals, degen = fiber_points(hyp, ch, w, "backward")
        assert not degen.any()
        assert vals.shape == (50, hyp.d2)

    def test_branch_visit_bound(self, hyp):
        data = critical_values(hyp)
        ram = [(v.chart, v.coord) for v in data.b2 if v.kind == "ramification"]
        cap = len(data.b2)
        for seed in range(40):
            path = sample_branch_path(hyp, 2.0, 12, seed=seed, direction="forward")
            visits = 0
            for ch, w in path.points[1:]:
                d = min(sphere.chordal(ch, w, c2, w2) for c2, w2 in ram)
                visits += d < 1e-6
            assert visits <= cap
            assert max(path.residuals) < 1e-9
            assert path.weight == 2.0 ** -12

    def test_lojasiewicz_exponent(self, sq):
        # matched preimages of nearby points around the critical value 0 split
        # no worse than dist^(1/delta); for the squaring map the true exponent
        # is 1/2 and delta = 4
        delta = delta_bound(sq)
        hs = np.array([1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
        spreads = []
        for h in hs:
            a, b = h, -h
            va, _ = fiber_points(sq, [0], [a], "backward")
            vb, _ = fiber_points(sq, [0], [b], "backward")
            best = np.inf
            for perm in ([0, 1], [1, 0]):
                m = max(abs(va[0][i] - vb[0][perm[i]]) for i in range(2))
                best = min(best, m)
            spreads.append(best)
        slope = np.polyfit(np.log(2 * hs), np.log(spreads), 1)[0]
        assert slope >= 1.0 / delta - 0.1


class TestSerialization:
    def test_round_trip_bit_exact(self, hyp):
        f2 = from_text(to_text(hyp))
        assert np.array_equal(f2.P.coeffs, hyp.P.coeffs)
        assert content_hash(f2) == content_hash(hyp)

    def test_random_round_trip(self):
        f = gallery.random_correspondence((3, 2), seed=77)
        f2 = from_text(to_text(f))
        assert np.array_equal(f2.P.coeffs, f.P.coeffs)

    def test_factored_round_trip(self, lin):
        f2 = from_text(to_text(lin))
        assert f2.factors is not None
        assert all(np.array_equal(a.coeffs, b.coeffs)
                   for (a, _), (b, _) in zip(f2.factors, lin.factors))


class TestConjugation:
    def test_rotation_preserves_degrees_and_dynamics(self, hyp):
        M = sphere.random_rotation(21)
        g = conjugate(hyp, M)
        assert (g.d1, g.d2) == (hyp.d1, hyp.d2)
        # fibers transform equivariantly: f^{-1}(M a) = M g^{-1}(a)
        a = 0.7 + 0.2j
        ch, w = sphere.to_chart(np.array([a]))
        cha, wa = sphere.mobius_apply(M, ch, w)
        va, _ = fiber_points(hyp, cha, wa, "backward")
        vg, _ = fiber_points(g, ch, w, "backward")
        chg, wg = sphere.to_chart(vg[0])
        chm, wm = sphere.mobius_apply(M, chg, wg)
        got = sorted(sphere.from_chart(chm, wm), key=lambda z: (z.real, z.imag))
        want = sorted(va[0], key=lambda z: (z.real, z.imag))
        assert np.max(np.abs(np.array(got) - np.array(want))) < 1e-8

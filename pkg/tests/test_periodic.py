import numpy as np
import pytest

from corrdyn import gallery
from corrdyn.algebra import BiPoly
from corrdyn.correspondence import CorrespondenceError, from_bipoly
from corrdyn.periodic import (
    graph_pairing,
    periodic_count_with_multiplicity,
    periodic_points,
    periodic_table,
)


def _by_location(points):
    out = {}
    for p in points:
        key = "inf" if (p.chart == 1 and p.coord == 0) else np.round(p.as_extended(), 6)
        out.setdefault(key, []).append(p)
    return out


class TestFixedPoints:
    def test_linear_pair_crossing_germs(self, lin):
        pts = periodic_points(lin, 1)
        assert periodic_count_with_multiplicity(pts) == 4
        loc = _by_location(pts)
        zero_mults = sorted(round(abs(p.multiplier), 6) for p in loc[0j])
        inf_mults = sorted(round(abs(p.multiplier), 6) for p in loc["inf"])
        assert zero_mults == [2.0, 3.0]
        assert np.allclose(inf_mults, [1 / 3, 1 / 2], atol=1e-9)
        assert all(p.kind == "repelling" for p in loc[0j])
        assert all(p.kind == "attracting" for p in loc["inf"])

    def test_squaring_classical(self, sq):
        pts = periodic_points(sq, 1)
        assert periodic_count_with_multiplicity(pts) == sq.d1 + sq.d2
        loc = _by_location(pts)
        assert abs(loc[(1 + 0j)][0].multiplier - 2.0) < 1e-8
        assert abs(loc[0j][0].multiplier) < 1e-8
        assert abs(loc["inf"][0].multiplier) < 1e-8

    def test_period_two_of_squaring(self, sq):
        pts = periodic_points(sq, 2)
        assert periodic_count_with_multiplicity(pts) == sq.d1 ** 2 + sq.d2 ** 2
        # the 2-cycle {exp(2 pi i/3), exp(4 pi i/3)} appears with multiplier 4
        cyc = [p for p in pts if abs(abs(p.as_extended()) - 1.0) < 1e-6
               and abs(p.as_extended() - 1.0) > 1e-6]
        assert len(cyc) == 2
        assert all(abs(p.multiplier - 4.0) < 1e-6 for p in cyc)

    def test_residuals_recorded(self, hyp):
        pts = periodic_points(hyp, 1)
        assert all(p.residual < 1e-8 for p in pts)


class TestCounts:
    @pytest.mark.parametrize("seed", range(5))
    def test_seeded_counts_match_intersection_number(self, seed):
        f = gallery.random_correspondence((2, 2), seed=500 + seed)
        for n in (1, 2, 3):
            pts = periodic_points(f, n)
            assert periodic_count_with_multiplicity(pts) == 2 * 2 ** n

    def test_diagonal_graph_rejected(self):
        ident = from_bipoly(BiPoly([[0, 1], [-1, 0]]))   # the diagonal itself
        with pytest.raises(CorrespondenceError, match="diagonal"):
            periodic_points(ident, 1)


class TestClassificationStability:
    def test_small_perturbations_keep_classes(self, lin):
        # perturbing a crossing point splits it and moves the multipliers, but
        # the repelling/attracting classes of clearly hyperbolic points persist
        def class_counts(f):
            out = {"repelling": 0, "attracting": 0}
            for p in periodic_points(f, 1):
                if abs(abs(p.multiplier) - 1.0) > 0.1:
                    out[p.kind] = out.get(p.kind, 0) + p.multiplicity
            return out

        base = class_counts(lin)
        assert base == {"repelling": 2, "attracting": 2}
        g = np.random.Generator(np.random.Philox(key=np.uint64(123)))
        for _ in range(5):
            noise = 1e-9 * (g.normal(size=(3, 3)) + 1j * g.normal(size=(3, 3)))
            f2 = from_bipoly(BiPoly(lin.P.coeffs + noise))
            assert class_counts(f2) == base


class TestTable:
    def test_table_format(self, sq):
        text = periodic_table(periodic_points(sq, 1))
        lines = text.strip().split("\n")
        assert lines[0].startswith("#")
        assert len(lines) == 4
        fields = lines[1].split()
        assert len(fields) == 8
        assert fields[7] in ("repelling", "attracting", "neutral")


class TestGraphPairing:
    def test_constant_phi_gives_total_mass(self, hyp, dictionary):
        phi = dictionary.function(0, 0, "re")
        out = graph_pairing(hyp, 3, phi, psi_budget=20000, seed=1, grid_res=32)
        # both sides equal c_psi times the constant value of phi
        const = phi.eval(np.array([[0.0, 0.0, 1.0]]))[0]
        assert abs(out["lhs"] - const) < 1e-9
        assert abs(out["rhs"] - const) < 1e-9

    def test_hyperbola_converges_with_depth(self, hyp, dictionary):
        phi = dictionary.function(1, 0, "re")
        gaps = []
        for n in (4, 10):
            out = graph_pairing(hyp, n, phi, psi_budget=50000, seed=3, grid_res=64)
            gaps.append(abs(out["lhs"] - out["rhs"]))
        assert gaps[1] < gaps[0]

    def test_linear_pair_concentrates_at_zero(self, lin, dictionary):
        phi = dictionary.function(2, 0, "re")
        out = graph_pairing(lin, 14, phi, psi_budget=30000, seed=2, grid_res=64)
        want = phi.eval(np.array([[0.0, 0.0, -1.0]]))[0]   # phi at the origin
        assert abs(out["lhs"] - want) < 0.05

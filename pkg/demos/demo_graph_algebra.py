#!/usr/bin/env python3
"""Graph algebra walkthrough: composition, iteration, adjoints, critical sets.

A correspondence is a curve P(x, y) = 0 in the product of two spheres,
acting as the multivalued map x -> {y : P(x, y) = 0}.  Composition is
resultant elimination of the middle variable; the degree law
d_j(f o g) = d_j(f) d_j(g) is exact after stripping fiber artifacts.
"""
import numpy as np

from corrdyn import gallery
from corrdyn.correspondence import (
    adjoint, compose, critical_orbit_report, critical_values, delta_bound, iterate,
)


def show(name, f):
    print(f"{name}: d1 = {f.d1} (values), d2 = {f.d2} (preimages)")


def fmt(v):
    return "inf" if (v.chart == 1 and v.coord == 0) else f"{v.as_extended():.4g}"


sq = gallery.squaring_map()
lin = gallery.linear_pair()
hyp = gallery.hyperbola()

show("squaring map  y = x^2       ", sq)
show("linear pair   {2x, 3x}      ", lin)
show("hyperbola     y^2 = x^2 + 1 ", hyp)
print()

print("composing the squaring map with itself eliminates y from")
print("  {y = x^2} and {z = y^2}  ->  z = x^4:")
c = compose(sq, sq)
print("  bidegree:", c.P.bidegree, " coefficients:")
print(np.round(c.P.normalized().coeffs.T, 12))
print()

it = iterate(lin, 2)
print("second iterate of the linear pair has bidegree", it.P.bidegree)
print("its value set over x = 1 enumerates the branch products 2*2, 2*3, 3*2, 3*3:")
from corrdyn.correspondence import fiber_points
vals, _ = fiber_points(it, [0], [1.0], "forward")
print(" ", sorted(np.round(vals[0].real, 6)))
print()

adj = adjoint(hyp)
print("adjoint swaps the degrees:", (hyp.d1, hyp.d2), "->", (adj.d1, adj.d2))
print("and is an involution at coefficient level:",
      np.array_equal(adjoint(adj).P.coeffs, hyp.P.coeffs))
print()

print("critical sets of the hyperbola (values where fiber branches collide):")
data = critical_values(hyp)
print("  B2 =", ", ".join(f"{fmt(v)} [{v.kind}]" for v in data.b2))
print("  B1 =", ", ".join(f"{fmt(v)} [{v.kind}]" for v in data.b1))
print("local-degree bound d^#B2 =", delta_bound(hyp, data=data))
print()

print("forward orbits of the critical values (periodicity would break the")
print("equidistribution-rate hypothesis):")
rep = critical_orbit_report(hyp, horizon=10)
for e in rep.entries:
    print(f"  {fmt(e.value)}: periodic={e.periodic_detected} certified={e.certified} "
          f"min return distance {e.min_return_distance:.3g}")
print("hypothesis unverified:", rep.hypothesis_unverified)

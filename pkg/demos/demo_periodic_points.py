#!/usr/bin/env python3
"""Periodic points from the iterated graph meeting the diagonal.

Points come with germ multipliers: at a crossing of several branches each
germ reports its own multiplier (the tangent slopes of the local homogeneous
form), and fixed points at infinity are read off the inverted chart.  The
total count with multiplicity is d1^n + d2^n, the intersection number with
the diagonal class.
"""
import numpy as np

from corrdyn import gallery
from corrdyn.measures import TestDictionary, dual_lip_distance
from corrdyn.periodic import periodic_count_with_multiplicity, periodic_points, periodic_table
from corrdyn.pointcloud import PointCloudMeasure
from corrdyn.transport import backward_cloud


def loc(p):
    return "inf" if (p.chart == 1 and p.coord == 0) else f"{p.as_extended():.4g}"


lin = gallery.linear_pair()
print("fixed points of the linear pair {2x, 3x}:")
for p in periodic_points(lin, 1):
    print(f"  {loc(p):>8}  multiplier {p.multiplier:.4g}  [{p.kind}]")
print("  count with multiplicity:", periodic_count_with_multiplicity(periodic_points(lin, 1)),
      "= d1 + d2 =", lin.d1 + lin.d2)
print()

sq = gallery.squaring_map()
print("squaring map, periods 1 and 2:")
for n in (1, 2):
    pts = periodic_points(sq, n)
    print(f"  n={n}: " + ", ".join(f"{loc(p)} (mult {abs(p.multiplier):.3g}, {p.kind})"
                                   for p in pts))
print()

f = gallery.random_correspondence((2, 2), seed=42)
print("random bidegree-(2,2) correspondence: counts vs the intersection number")
for n in (1, 2, 3):
    pts = periodic_points(f, n)
    got = periodic_count_with_multiplicity(pts)
    rep = [p for p in pts if p.kind == "repelling"]
    print(f"  n={n}: {got:3d} points (expected {2 * 2 ** n:3d}), "
          f"repelling fraction {len(rep) / len(pts):.2f}")
print()

# recorded comparison: repelling points against the empirical backward measure
pts = periodic_points(f, 3)
rep = [p for p in pts if p.kind == "repelling"]
cloud = PointCloudMeasure(np.array([p.chart for p in rep], dtype=np.uint8),
                          np.array([p.coord for p in rep]),
                          np.full(len(rep), 1.0 / len(rep)))
mu = backward_cloud(f, 0.37 + 0.21j, 10, max_atoms=20000, seed=5)
D = TestDictionary(l_max=8)
print(f"dual-Lipschitz distance of the repelling distribution (n=3) to the")
print(f"empirical backward measure: {dual_lip_distance(cloud, mu, D):.4f}  (recorded, no threshold)")
print()
print(periodic_table(periodic_points(sq, 1)))

#!/usr/bin/env python3
"""Density rasters of orbit clouds: two equal-area chart squares side by side.

Each chart disk is mapped area-preservingly onto a square (concentric-square
remap of the Fubini-Study radial measure), so uniform measures render flat
and the unit circle lands on the boundary ring of both squares.  Output is
16-bit grayscale PGM, written into demos/output/.
"""
import os

import numpy as np

from corrdyn import gallery, sphere
from corrdyn.measures import render_density, save_pgm
from corrdyn.pointcloud import PointCloudMeasure
from corrdyn.transport import backward_cloud

out_dir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(out_dir, exist_ok=True)

sq = gallery.squaring_map()
ring = backward_cloud(sq, 3.0, 14, max_atoms=200000, seed=1)
img = render_density(ring, resolution=512, bandwidth=2.0)
save_pgm(os.path.join(out_dir, "squaring_circle.pgm"), img)
print("squaring map, depth 14: ring on the chart boundary ->",
      os.path.join(out_dir, "squaring_circle.pgm"))

hyp = gallery.hyperbola()
cloud = backward_cloud(hyp, 1.0, 12, max_atoms=200000, seed=2)
img = render_density(cloud, resolution=512, bandwidth=2.0)
save_pgm(os.path.join(out_dir, "hyperbola_backward.pgm"), img)
print("hyperbola, depth 12: mass climbing the imaginary axis ->",
      os.path.join(out_dir, "hyperbola_backward.pgm"))

g = np.random.Generator(np.random.Philox(key=np.uint64(7)))
xyz = g.normal(size=(200000, 3))
xyz /= np.linalg.norm(xyz, axis=1, keepdims=True)
ch, w = sphere.xyz_to_chart(xyz)
unif = PointCloudMeasure(ch, w, np.full(len(w), 1.0 / len(w)))
img = render_density(unif, resolution=256, bandwidth=2.0)
save_pgm(os.path.join(out_dir, "uniform.pgm"), img)
flat = img.astype(float)
print(f"uniform cloud renders flat: max/min pixel ratio {flat.max() / flat.min():.3f} ->",
      os.path.join(out_dir, "uniform.pgm"))

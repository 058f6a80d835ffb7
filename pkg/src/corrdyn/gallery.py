"""Named example correspondences used by the demos and tests."""
from __future__ import annotations

import numpy as np

from .algebra import BiPoly
from .correspondence import Correspondence, from_bipoly


def squaring_map() -> Correspondence:
    """y - x^2: the classical degree-two map, bidegree (2, 1)."""
    return from_bipoly(BiPoly([[0, 1], [0, 0], [-1, 0]]))


def basilica_map() -> Correspondence:
    """y - x^2 + 1: its critical value -1 lies on a certified 2-cycle."""
    return from_bipoly(BiPoly([[1, 1], [0, 0], [-1, 0]]))


def linear_pair(alpha: complex = 2.0, beta: complex = 3.0) -> Correspondence:
    """(y - alpha x)(y - beta x): union of two linear graphs, degree 2."""
    f1 = np.array([[0, 1], [-alpha, 0]], dtype=complex)
    f2 = np.array([[0, 1], [-beta, 0]], dtype=complex)
    P = np.zeros((3, 3), dtype=complex)
    # expand (y - a x)(y - b x) = y^2 - (a+b) x y + a b x^2
    P[0, 2] = 1.0
    P[1, 1] = -(alpha + beta)
    P[2, 0] = alpha * beta
    return from_bipoly(BiPoly(P), factors=[(BiPoly(f1), 1), (BiPoly(f2), 1)])


def hyperbola() -> Correspondence:
    """y^2 - x^2 - 1: generic balanced correspondence of degree 2."""
    return from_bipoly(BiPoly([[-1, 0, 1], [0, 0, 0], [-1, 0, 0]]))


def self_adjoint_squarer() -> Correspondence:
    """(y - x^2)(x - y^2): equal to its own adjoint, degree 3."""
    P = np.zeros((4, 4), dtype=complex)
    P[1, 1] = 1.0    # x y
    P[0, 3] = -1.0   # -y^3
    P[3, 0] = -1.0   # -x^3
    P[2, 2] = 1.0    # x^2 y^2
    return from_bipoly(BiPoly(P),
                       factors=[(BiPoly([[0, 1], [0, 0], [-1, 0]]), 1),
                                (BiPoly([[0, 0, -1], [1, 0, 0]]), 1)])


def rotation_pair(k1: int = 32, k2: int = -32, denom: int = 256) -> Correspondence:
    """Union of two polar rotations z -> exp(2 pi i k/denom) z.

    Both projections restricted to the graph are isometric for the round
    metric, the discrete analogue of a weakly modular correspondence; the
    one-form contraction estimate sits at 1.  With denom equal to the grid
    resolution the rotations are exact lattice shifts in azimuth.
    """
    e1 = np.exp(2j * np.pi * k1 / denom)
    e2 = np.exp(2j * np.pi * k2 / denom)
    P = np.zeros((3, 3), dtype=complex)
    P[0, 2] = 1.0
    P[1, 1] = -(e1 + e2)
    P[2, 0] = e1 * e2
    f1 = np.array([[0, 1], [-e1, 0]], dtype=complex)
    f2 = np.array([[0, 1], [-e2, 0]], dtype=complex)
    return from_bipoly(BiPoly(P), factors=[(BiPoly(f1), 1), (BiPoly(f2), 1)])


def random_correspondence(bidegree=(2, 2), seed: int = 0) -> Correspondence:
    """Seeded dense random coefficients (complex Gaussian), validated."""
    a, b = bidegree
    g = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    for _ in range(16):
        C = g.normal(size=(a + 1, b + 1)) + 1j * g.normal(size=(a + 1, b + 1))
        try:
            return from_bipoly(BiPoly(C))
        except Exception:
            continue
    raise RuntimeError("could not draw a valid random correspondence")

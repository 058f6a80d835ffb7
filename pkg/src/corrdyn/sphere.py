"""Riemann-sphere geometry: two-chart atlas, chordal metric, quadrature grid.

Points are handled in a two-chart atlas.  Chart 0 carries the standard
coordinate z, chart 1 the inverted coordinate w = 1/z; a point is stored in
the chart where its coordinate has modulus <= 1.  The chordal distance is
the Euclidean distance of the stereographic embeddings into the unit sphere
(so the diameter is 2).  The quadrature grid is an equal-area pixelization:
uniform in azimuth and in the height coordinate s = cos(theta), which makes
every Fubini-Study weight exactly 1/N.
"""
from __future__ import annotations

import numpy as np

INF = complex(np.inf, 0.0)


def is_inf(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return ~np.isfinite(z.real) | ~np.isfinite(z.imag)


def to_chart(z):
    """Canonicalize extended-complex values into (chart, coord) arrays."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    chart = np.zeros(z.shape, dtype=np.uint8)
    coord = z.copy()
    inf = is_inf(z)
    far = (~inf) & (np.abs(z) > 1.0)
    chart[inf | far] = 1
    coord[inf] = 0.0
    coord[far] = 1.0 / z[far]
    return chart, coord


def from_chart(chart, coord):
    """Back to extended complex numbers (infinity as complex inf)."""
    chart = np.asarray(chart)
    coord = np.asarray(coord, dtype=complex)
    z = coord.copy()
    m = chart == 1
    with np.errstate(divide="ignore", invalid="ignore"):
        z[m] = np.where(coord[m] == 0, INF, 1.0 / coord[m])
    return z


def embed(chart, coord):
    """Stereographic embedding into R^3 (unit sphere, infinity -> north pole)."""
    chart = np.asarray(chart)
    w = np.asarray(coord, dtype=complex)
    n = np.abs(w) ** 2
    denom = 1.0 + n
    x = 2.0 * w.real / denom
    y = 2.0 * w.imag / denom
    zc = (n - 1.0) / denom
    m = chart == 1
    y = np.where(m, -y, y)
    zc = np.where(m, -zc, zc)
    return np.stack([x, y, zc], axis=-1)


def chordal(chart_a, coord_a, chart_b, coord_b):
    """Chordal distance, in [0, 2]."""
    pa = embed(chart_a, coord_a)
    pb = embed(chart_b, coord_b)
    return np.linalg.norm(pa - pb, axis=-1)


def chordal_points(a, b):
    """Chordal distance between extended-complex scalars or arrays."""
    ca, wa = to_chart(a)
    cb, wb = to_chart(b)
    return chordal(ca, wa, cb, wb)


def height_azimuth(chart, coord):
    """Sphere coordinates (s, phi): s = height in [-1,1], phi = azimuth."""
    chart = np.asarray(chart)
    w = np.asarray(coord, dtype=complex)
    n = np.abs(w) ** 2
    s = (n - 1.0) / (n + 1.0)
    phi = np.angle(w)
    m = chart == 1
    s = np.where(m, -s, s)
    phi = np.where(m, -phi, phi)
    return s, phi % (2.0 * np.pi)


class SphereGrid:
    """Equal-area node grid: `res` rows in s = cos(theta), `res` azimuth columns.

    Node (i, j) sits at s_i = -1 + (i+1/2)*2/res, phi_j = (j+1/2)*2*pi/res and
    carries Fubini-Study weight 1/res^2.  Node chart-0 coordinates z_k are
    finite and nonzero for every node, with |z| up to ~2*sqrt(res).
    """

    def __init__(self, res: int):
        if res < 4:
            raise ValueError("grid resolution must be at least 4")
        self.res = int(res)
        i = np.arange(res)
        self.s = -1.0 + (i + 0.5) * (2.0 / res)
        self.phi = (i + 0.5) * (2.0 * np.pi / res)
        r = np.sqrt((1.0 + self.s) / (1.0 - self.s))
        self.z = r[:, None] * np.exp(1j * self.phi)[None, :]
        self.weight = 1.0 / (res * res)
        self.metric = 1.0 + np.abs(self.z) ** 2      # = 2 / (1 - s)
        c, w = to_chart(self.z.ravel())
        self.node_chart = c
        self.node_coord = w

    @property
    def n_nodes(self) -> int:
        return self.res * self.res

    def interpolate(self, values: np.ndarray, chart, coord) -> np.ndarray:
        """Bilinear interpolation of per-node values at arbitrary sphere points.

        Azimuth wraps around; the height coordinate is clamped at the pole rows.
        """
        values = np.asarray(values).reshape(self.res, self.res)
        s, phi = height_azimuth(chart, coord)
        fi = (s + 1.0) * (self.res / 2.0) - 0.5
        fj = phi * (self.res / (2.0 * np.pi)) - 0.5
        i0 = np.floor(fi).astype(int)
        j0 = np.floor(fj).astype(int)
        ti = fi - i0
        tj = fj - j0
        i0c = np.clip(i0, 0, self.res - 1)
        i1c = np.clip(i0 + 1, 0, self.res - 1)
        j0c = j0 % self.res
        j1c = (j0 + 1) % self.res
        v00 = values[i0c, j0c]
        v01 = values[i0c, j1c]
        v10 = values[i1c, j0c]
        v11 = values[i1c, j1c]
        return ((1 - ti) * (1 - tj) * v00 + (1 - ti) * tj * v01
                + ti * (1 - tj) * v10 + ti * tj * v11)


def fibonacci_points(n: int) -> np.ndarray:
    """Quasi-uniform sample of n points on the unit sphere (for validation)."""
    i = np.arange(n)
    golden = (1.0 + 5.0 ** 0.5) / 2.0
    s = 1.0 - (2.0 * i + 1.0) / n
    phi = 2.0 * np.pi * i / golden
    r = np.sqrt(1.0 - s * s)
    return np.stack([r * np.cos(phi), r * np.sin(phi), s], axis=-1)


def xyz_to_chart(pts: np.ndarray):
    """Inverse of `embed` for unit vectors."""
    pts = np.asarray(pts, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    north = z > 0.0
    # southern hemisphere -> chart 0, northern -> chart 1 (|coord| <= 1 both ways)
    w0 = (x + 1j * y) / np.where(north, 1.0, 1.0 - z)
    w1 = (x - 1j * y) / np.where(north, 1.0 + z, 1.0)
    chart = north.astype(np.uint8)
    coord = np.where(north, w1, w0)
    return chart, coord


def harmonic_labels(l_max: int):
    """(l, m, part) labels of the real spherical-harmonic basis up to degree l_max."""
    labels = []
    for l in range(l_max + 1):
        labels.append((l, 0, "re"))
        for m in range(1, l + 1):
            labels.append((l, m, "re"))
            labels.append((l, m, "im"))
    return labels


def harmonic_matrix(xyz: np.ndarray, l_max: int) -> np.ndarray:
    """Real orthonormal spherical harmonics evaluated at unit vectors.

    Returns an ((l_max+1)^2, N) float matrix in `harmonic_labels` order.
    """
    from scipy.special import sph_harm_y

    xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
    theta = np.arccos(np.clip(xyz[:, 2], -1.0, 1.0))
    phi = np.arctan2(xyz[:, 1], xyz[:, 0])
    rows = []
    s2 = np.sqrt(2.0)
    for l in range(l_max + 1):
        rows.append(np.real(sph_harm_y(l, 0, theta, phi)))
        for m in range(1, l + 1):
            y = sph_harm_y(l, m, theta, phi)
            sgn = (-1.0) ** m
            rows.append(s2 * sgn * np.real(y))
            rows.append(s2 * sgn * np.imag(y))
    return np.array(rows)


def harmonic_single(xyz: np.ndarray, l: int, m: int, part: str) -> np.ndarray:
    """One real spherical harmonic evaluated at unit vectors."""
    from scipy.special import sph_harm_y

    xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
    theta = np.arccos(np.clip(xyz[:, 2], -1.0, 1.0))
    phi = np.arctan2(xyz[:, 1], xyz[:, 0])
    y = sph_harm_y(l, m, theta, phi)
    if m == 0:
        return np.real(y)
    sgn = (-1.0) ** m
    comp = np.real(y) if part == "re" else np.imag(y)
    return np.sqrt(2.0) * sgn * comp


# ---------------------------------------------------------------------------
# Moebius transformations (2x2 complex matrices acting as z -> (az+b)/(cz+d))

def random_rotation(seed: int) -> np.ndarray:
    """Seeded random SU(2) matrix: a rotation of the sphere."""
    g = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    q = g.normal(size=4)
    q /= np.linalg.norm(q)
    a = q[0] + 1j * q[1]
    b = q[2] + 1j * q[3]
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def mobius_apply(M: np.ndarray, chart, coord):
    """Apply a Moebius matrix to canonical chart points, returning chart points."""
    chart = np.asarray(chart)
    w = np.asarray(coord, dtype=complex)
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    # chart 0: z = w      -> (a w + b) / (c w + d)
    # chart 1: z = 1/w    -> (a + b w) / (c + d w)
    num = np.where(chart == 0, a * w + b, a + b * w)
    den = np.where(chart == 0, c * w + d, c + d * w)
    out_chart = (np.abs(num) > np.abs(den)).astype(np.uint8)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(out_chart == 0, num / den, den / num)
    out = np.where(np.isfinite(out), out, 0.0)
    return out_chart, out


def mobius_inverse(M: np.ndarray) -> np.ndarray:
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    return np.array([[d, -b], [-c, a]])

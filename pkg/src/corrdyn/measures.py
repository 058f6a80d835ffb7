"""Measure diagnostics: pairings, dual-Lipschitz distances, rates, mixing.

The test dictionary is a fixed family of real spherical harmonics with
recorded Lipschitz constants (with respect to the chordal metric) and sup
norms.  Distances between clouds are sups of normalized pairing differences
over the non-constant dictionary members, which metrizes weak-* convergence
at the resolution the dictionary can see.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from . import sphere, transport
from .correspondence import Correspondence, critical_orbit_report, fiber_points
from .policy import DEFAULT_POLICY, NumericPolicy
from .pointcloud import PointCloudMeasure


@dataclass(frozen=True)
class TestFunction:
    """Real Lipschitz test function on the sphere (vectorized over unit vectors)."""
    __test__ = False
    name: str
    index: int
    label: tuple
    lip: float
    sup: float
    is_constant: bool

    def eval(self, xyz: np.ndarray) -> np.ndarray:
        l, m, part = self.label
        return sphere.harmonic_single(xyz, l, m, part)


class TestDictionary:
    """Real spherical harmonics up to a fixed degree, with Lipschitz bounds.

    Contains the constant function (degree zero); distances exclude it.  The
    recorded Lipschitz constants and sup norms are sampled bounds with a
    safety factor, validated once against dense point pairs in the test
    suite.
    """

    __test__ = False          # not a pytest class, despite the name

    def __init__(self, l_max: int = 8, n_validate: int = 20000, seed: int = 12345):
        self.l_max = int(l_max)
        self.labels = sphere.harmonic_labels(self.l_max)
        pts = sphere.fibonacci_points(n_validate)
        vals = sphere.harmonic_matrix(pts, self.l_max)
        self.sups = np.max(np.abs(vals), axis=1) * 1.05
        # gradient sampling: random tangent steps from a seeded generator
        g = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        t = g.normal(size=pts.shape)
        t -= (np.sum(t * pts, axis=1, keepdims=True)) * pts
        t /= np.linalg.norm(t, axis=1, keepdims=True)
        eps = 1e-5
        q = pts + eps * t
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        vals_q = sphere.harmonic_matrix(q, self.l_max)
        chord = np.linalg.norm(q - pts, axis=1)
        grad = np.max(np.abs(vals_q - vals) / chord, axis=1)
        # chordal Lipschitz constant: geodesic/chordal ratio is at most pi/2
        self.lips = np.maximum(grad * (np.pi / 2.0) * 1.1, 1e-12)
        self.is_constant = np.array([l == 0 for (l, m, p) in self.labels])

    def __len__(self):
        return len(self.labels)

    @property
    def functions(self):
        return [TestFunction(name=f"Y{l},{m},{p}", index=k, label=(l, m, p),
                             lip=float(self.lips[k]), sup=float(self.sups[k]),
                             is_constant=bool(self.is_constant[k]))
                for k, (l, m, p) in enumerate(self.labels)]

    def function(self, l: int, m: int, part: str = "re") -> TestFunction:
        k = self.labels.index((l, m, part))
        return self.functions[k]

    def eval_matrix(self, xyz: np.ndarray) -> np.ndarray:
        return sphere.harmonic_matrix(xyz, self.l_max)

    def pairings(self, mu: PointCloudMeasure) -> np.ndarray:
        """All dictionary pairings <mu, phi_k> at once."""
        F = self.eval_matrix(mu.embed())
        return F @ mu.weight


def pair(mu: PointCloudMeasure, phi) -> float:
    """Exact pairing sum w_i phi(p_i); phi is a TestFunction or (callable, lip)."""
    xyz = mu.embed()
    if isinstance(phi, TestFunction):
        vals = phi.eval(xyz)
    elif callable(phi):
        vals = np.asarray(phi(xyz), dtype=float)
    else:
        raise TypeError("phi must be a TestFunction or a callable on unit vectors")
    return float(vals @ mu.weight)


def dual_lip_distance(mu: PointCloudMeasure, nu: PointCloudMeasure,
                      dictionary: TestDictionary) -> float:
    """Max over non-constant dictionary members of |<mu-nu, phi>| / Lip(phi)."""
    if len(dictionary) == 0:
        raise ValueError("empty dictionary")
    a = dictionary.pairings(mu)
    b = dictionary.pairings(nu)
    sel = ~dictionary.is_constant
    return float(np.max(np.abs(a[sel] - b[sel]) / dictionary.lips[sel]))


def _lambda_phi_at_atoms(f: Correspondence, mu: PointCloudMeasure,
                         dictionary: TestDictionary,
                         policy: NumericPolicy) -> np.ndarray:
    """(Lambda phi_k)(atom_i) for all k, by exact per-atom fiber solves."""
    vals, degen = fiber_points(f, mu.chart, mu.coord, "backward", policy=policy)
    if np.any(degen):
        raise ValueError("degenerate fiber at a cloud atom")
    N, d = vals.shape
    ch, w = sphere.to_chart(vals.reshape(-1))
    F = dictionary.eval_matrix(sphere.embed(ch, w))
    return F.reshape(len(dictionary), N, d).mean(axis=2)


def invariance_residual(f: Correspondence, mu: PointCloudMeasure,
                        dictionary: TestDictionary,
                        policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Dual-Lipschitz defect of f*-invariance: sup |<mu, Lambda phi> - <mu, phi>| / Lip.

    Lambda phi is evaluated exactly at the atoms (fiber solves, no grid), so a
    small residual certifies approximate invariance of the cloud under the
    normalized pullback in the duality sense.
    """
    lam = _lambda_phi_at_atoms(f, mu, dictionary, policy)
    feats = dictionary.pairings(mu)
    lhs = lam @ mu.weight
    sel = ~dictionary.is_constant
    return float(np.max(np.abs(lhs[sel] - feats[sel]) / dictionary.lips[sel]))


@dataclass(frozen=True)
class RateReport:
    n_values: tuple
    distances: tuple
    lam: float
    lam_band: tuple
    fit_residual: float
    hypothesis_unverified: bool
    unreliable: bool
    reference_n: int


def rate_fit(f: Correspondence, a, n_range, dictionary: TestDictionary,
             seed: int = 0, budget: int = 100000, orbit_horizon: int = 10,
             policy: NumericPolicy = DEFAULT_POLICY) -> RateReport:
    """Decay-rate fit for backward clouds against a deeper coupled snapshot.

    Distances d_n = dual_lip(mu_n, mu_N) with N = max(n_range) + 4 are fitted
    log-linearly; the reported rate is exp(slope).  The reference comes from
    the same chain (coupled randomness), avoiding any circular dependence on
    a converged ground truth.  If a certified periodic critical value exists,
    the report is flagged hypothesis_unverified rather than suppressed.
    """
    ns = sorted(set(int(n) for n in n_range))
    if len(ns) < 3:
        raise ValueError("need at least three depths to fit a rate")
    rep = critical_orbit_report(f, horizon=orbit_horizon, policy=policy)
    n_ref = ns[-1] + 4
    clouds = transport.backward_cloud_series(f, a, ns + [n_ref], max_atoms=budget,
                                             seed=seed, policy=policy)
    ref_feats = dictionary.pairings(clouds[n_ref])
    sel = ~dictionary.is_constant
    dists = []
    for n in ns:
        feats = dictionary.pairings(clouds[n])
        dists.append(float(np.max(np.abs(feats[sel] - ref_feats[sel]) / dictionary.lips[sel])))
    d = np.asarray(dists)
    floor = 1e-13
    ok = d > floor
    unreliable = False
    if np.sum(ok) < 3:
        unreliable = True
        ok = np.ones_like(ok)
    x = np.asarray(ns, float)[ok]
    y = np.log(np.maximum(d[ok], floor))
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    se = float(np.sqrt(max(cov[0, 0], 0.0)))
    lam = float(np.exp(slope))
    band = (float(np.exp(slope - 2 * se)), float(np.exp(slope + 2 * se)))
    # non-monotone beyond noise: flag the fit
    for k in range(len(d) - 1):
        if d[k + 1] > 3.0 * d[k] and d[k + 1] > 1e-10:
            unreliable = True
    return RateReport(n_values=tuple(ns), distances=tuple(dists), lam=lam,
                      lam_band=band, fit_residual=resid,
                      hypothesis_unverified=rep.hypothesis_unverified,
                      unreliable=unreliable, reference_n=n_ref)


def mixing_correlation(f: Correspondence, mu_plus: PointCloudMeasure,
                       phi: TestFunction, psi: TestFunction, n_range,
                       budget: int = 500000, seed: int = 0,
                       policy: NumericPolicy = DEFAULT_POLICY):
    """Correlation sequence I_n = <mu, (Lambda^n phi) psi> - <mu, phi><mu, psi>.

    Lambda^n phi is evaluated by exact per-atom preimage trees while the leaf
    count fits the budget and by a stratified Monte-Carlo walk beyond; the
    mc flag in the result records whether sampling kicked in.
    """
    ns = sorted(set(int(n) for n in n_range))
    n_max = ns[-1]
    xyz = mu_plus.embed()
    phi_mu = float(phi.eval(xyz) @ mu_plus.weight)
    psi_vals = psi.eval(xyz)
    psi_mu = float(psi_vals @ mu_plus.weight)

    N = len(mu_plus)
    ch = mu_plus.chart.copy()
    co = mu_plus.coord.copy()
    leaves_per_atom = 1
    mc = False
    out = []
    depth = 0
    for n in range(1, n_max + 1):
        vals, degen = fiber_points(f, ch, co, "backward", policy=policy)
        if np.any(degen):
            raise ValueError("degenerate fiber in mixing recursion")
        d = vals.shape[1]
        if len(ch) * d <= budget:
            ch, co = sphere.to_chart(vals.reshape(-1))
            leaves_per_atom *= d
        else:
            mc = True
            u = transport.step_rng(seed, 10 ** 6 + n).random(len(ch))
            idx = np.minimum((u * d).astype(int), d - 1)
            ch, co = sphere.to_chart(vals[np.arange(len(ch)), idx])
        depth = n
        if n in ns:
            pv = phi.eval(sphere.embed(ch, co))
            lam_phi = pv.reshape(N, leaves_per_atom).mean(axis=1)
            i_n = float((lam_phi * psi_vals) @ mu_plus.weight) - phi_mu * psi_mu
            out.append((n, i_n))
    return {"pairs": out, "mc": mc, "phi": phi.name, "psi": psi.name,
            "centering": (phi_mu, psi_mu)}


# ---------------------------------------------------------------------------
# density rendering


def _shirley_chiu(rho: np.ndarray, theta: np.ndarray):
    """Concentric equal-area map from the unit disk to the unit square."""
    theta = np.mod(theta + np.pi / 4.0, 2.0 * np.pi) - np.pi / 4.0
    a = np.empty_like(rho)
    b = np.empty_like(rho)
    r1 = theta < np.pi / 4.0
    r2 = (theta >= np.pi / 4.0) & (theta < 3.0 * np.pi / 4.0)
    r3 = (theta >= 3.0 * np.pi / 4.0) & (theta < 5.0 * np.pi / 4.0)
    r4 = ~(r1 | r2 | r3)
    a[r1] = rho[r1]
    b[r1] = rho[r1] * theta[r1] * (4.0 / np.pi)
    b[r2] = rho[r2]
    a[r2] = rho[r2] * (np.pi / 2.0 - theta[r2]) * (4.0 / np.pi)
    a[r3] = -rho[r3]
    b[r3] = -rho[r3] * (theta[r3] - np.pi) * (4.0 / np.pi)
    b[r4] = -rho[r4]
    a[r4] = rho[r4] * (theta[r4] - 3.0 * np.pi / 2.0) * (4.0 / np.pi)
    return a, b


def render_density(mu: PointCloudMeasure, resolution: int = 512,
                   bandwidth: float = 2.0) -> np.ndarray:
    """Kernel-smoothed histogram, two charts side by side, log intensity.

    Each chart disk is remapped area-preservingly (Fubini-Study) onto a
    square, so a uniform measure renders flat.  Returns a uint16 image of
    shape (resolution, 2 * resolution); write it with `save_pgm`.
    """
    if resolution > 4096:
        raise ValueError("resolution capped at 4096")
    imgs = []
    for chart in (0, 1):
        m = mu.chart == chart
        w = mu.coord[m]
        r = np.abs(w)
        # chart radius -> equal-area disk radius (chart disk carries mass 1/2)
        rho = r * np.sqrt(2.0 / (1.0 + r * r))
        a, b = _shirley_chiu(rho, np.angle(w))
        H, _, _ = np.histogram2d(a, b, bins=resolution, range=[[-1, 1], [-1, 1]],
                                 weights=mu.weight[m])
        imgs.append(gaussian_filter(H, sigma=bandwidth, mode="nearest"))
    img = np.concatenate(imgs, axis=1)
    img = np.log1p(img / max(img.max(), 1e-300) * 1e4)
    img = img / max(img.max(), 1e-300)
    return np.round(img * 65535.0).astype(np.uint16)


def save_pgm(path, img: np.ndarray):
    """16-bit grayscale portable graymap (big-endian samples, as PGM requires)."""
    img = np.asarray(img, dtype=np.uint16)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(img.astype(">u2").tobytes())

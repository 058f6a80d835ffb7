"""Graph calculus for holomorphic correspondences on the sphere.

A correspondence is an effective curve in P^1 x P^1, given in the affine
chart by a bivariate polynomial P(x, y) whose graph contains no fiber of
either projection.  deg_y P counts the values y in f(x), deg_x P counts the
preimages in f^{-1}(y); the latter is the topological degree.  Composition
is elimination of the middle variable, critical sets come from
discriminants verified against actual fibers, and orbits of critical values
decide whether the equidistribution-rate hypothesis can be certified.
"""
from __future__ import annotations

import json
import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import convolve2d

from . import sphere
from .algebra import (
    AlgebraError,
    BiPoly,
    UniPoly,
    batched_projective_roots,
    deflate_axis,
    discriminant,
    resultant_chain,
    roots,
    univariate_content_roots,
)
from .policy import DEFAULT_POLICY, NumericPolicy

log = logging.getLogger(__name__)


class CorrespondenceError(ValueError):
    pass


class CompositionDegenerateError(CorrespondenceError):
    pass


@dataclass(frozen=True)
class Correspondence:
    P: BiPoly
    d1: int
    d2: int
    factors: tuple | None = None        # optional ((BiPoly, multiplicity), ...)
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def degree(self) -> int:
        """Topological degree d2 (= d1 for the balanced correspondences here)."""
        return self.d2

    @property
    def balanced(self) -> bool:
        return self.d1 == self.d2

    def __repr__(self):
        return f"Correspondence(bidegree=({self.d2}, {self.d1}))"


def from_bipoly(P: BiPoly | np.ndarray, factors=None,
                policy: NumericPolicy = DEFAULT_POLICY) -> Correspondence:
    """Validate a defining polynomial and wrap it as a correspondence.

    Rejects the zero polynomial and any graph containing a fiber of either
    projection: a factor in x alone (common root of all coefficient columns
    or vanishing x-degree) or the symmetric condition in y.
    """
    if not isinstance(P, BiPoly):
        P = BiPoly(P)
    if P.is_zero:
        raise CorrespondenceError("zero polynomial")
    P = P.normalized()
    a, b = P.deg_x, P.deg_y
    if a == 0 and b == 0:
        raise CorrespondenceError("constant polynomial defines no curve")
    if a == 0 or b == 0:
        raise CorrespondenceError("graph contains a fiber (polynomial in one variable)")
    if univariate_content_roots(P.coeffs, axis=0, policy=policy):
        raise CorrespondenceError("graph contains a fiber of the first projection")
    if univariate_content_roots(P.coeffs, axis=1, policy=policy):
        raise CorrespondenceError("graph contains a fiber of the second projection")
    if factors is not None:
        factors = tuple((BiPoly(fc.coeffs if isinstance(fc, BiPoly) else fc).normalized(), int(m))
                        for fc, m in factors)
    return Correspondence(P=P, d1=b, d2=a, factors=factors)


def adjoint(f: Correspondence) -> Correspondence:
    """Graph reflected through (x, y) -> (y, x); swaps the two degrees."""
    factors = None
    if f.factors is not None:
        factors = tuple((p.transpose(), m) for p, m in f.factors)
    return Correspondence(P=f.P.transpose(), d1=f.d2, d2=f.d1, factors=factors)


def conjugate(f: Correspondence, M: np.ndarray,
              policy: NumericPolicy = DEFAULT_POLICY) -> Correspondence:
    """Coordinate change by a Moebius map M in both factors."""
    factors = None
    if f.factors is not None:
        factors = tuple((p.mobius_both(M), m) for p, m in f.factors)
    return from_bipoly(f.P.mobius_both(M), factors=factors, policy=policy)


def _bimul(c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    return convolve2d(c1, c2)


def _strip_content(c: np.ndarray, policy: NumericPolicy):
    """Remove finite univariate content factors; returns (coeffs, report)."""
    removed = []
    changed = True
    while changed:
        changed = False
        for axis in (0, 1):
            for r, m in univariate_content_roots(c, axis=axis, policy=policy):
                c = deflate_axis(c, r, m, axis=axis)
                c = c / np.max(np.abs(c))
                removed.append({"axis": "xz"[axis], "root": complex(r), "multiplicity": m})
                changed = True
    return c, removed


def _compose_poly(pg: BiPoly, pf: BiPoly, d2_target: int, d1_target: int,
                  policy: NumericPolicy):
    R = resultant_chain(pg, pf, policy=policy)
    if R.is_zero:
        raise CompositionDegenerateError("composition resultant vanished identically")
    c, removed = _strip_content(R.normalized().coeffs, policy)
    out = BiPoly(c).normalized()
    if removed:
        log.info("composition cleanup removed fiber factors: %s", removed)
    if out.deg_x != d2_target or out.deg_y != d1_target:
        raise CompositionDegenerateError(
            f"composition degenerated: got bidegree ({out.deg_x}, {out.deg_y}), "
            f"expected ({d2_target}, {d1_target}); retry after a random rotation "
            f"(sphere.random_rotation + conjugate)")
    return out, removed


def compose(f: Correspondence, g: Correspondence,
            policy: NumericPolicy = DEFAULT_POLICY) -> Correspondence:
    """Composite correspondence f o g (apply g first).

    The graph is Res_y(P_g(x, y), P_f(y, z)).  Spurious univariate content
    factors (fibers created by leading-coefficient collapse at infinity) are
    stripped with a logged report; the degree law d_j(f o g) = d_j(f) d_j(g)
    is then asserted, and failure raises CompositionDegenerateError since it
    signals a chart collision at infinity.
    """
    d2_target = f.d2 * g.d2
    d1_target = f.d1 * g.d1
    removed_all = []
    if f.factors is not None and g.factors is not None:
        parts = []
        for pf, mf in f.factors:
            for pg, mg in g.factors:
                piece, removed = _compose_poly(pg, pf, pg.deg_x * pf.deg_x, pg.deg_y * pf.deg_y, policy)
                parts.append((piece, mf * mg))
                removed_all += removed
        c = np.array([[1.0 + 0j]])
        for piece, m in parts:
            for _ in range(m):
                c = _bimul(c, piece.coeffs)
            c = c / np.max(np.abs(c))
        out = BiPoly(c).normalized()
        if out.deg_x != d2_target or out.deg_y != d1_target:
            raise CompositionDegenerateError(
                f"composition degenerated: factored product has bidegree "
                f"({out.deg_x}, {out.deg_y}), expected ({d2_target}, {d1_target})")
        result = from_bipoly(out, factors=parts, policy=policy)
    else:
        out, removed_all = _compose_poly(g.P, f.P, d2_target, d1_target, policy)
        result = from_bipoly(out, policy=policy)
    result.meta["cleanup"] = removed_all
    return result


def iterate(f: Correspondence, n: int, policy: NumericPolicy = DEFAULT_POLICY) -> Correspondence:
    """n-th iterate by repeated composition with renormalization."""
    if n < 1:
        raise CorrespondenceError("iterate requires n >= 1")
    if max(f.d1, f.d2) ** n > policy.iterate_degree_cap:
        raise CorrespondenceError(
            f"iterate cap exceeded: bidegree would reach {max(f.d1, f.d2) ** n}; "
            f"use Monte-Carlo transport (backward_cloud / forward_cloud) instead")
    out = f
    for _ in range(n - 1):
        out = compose(f, out, policy=policy)
    return out


# ---------------------------------------------------------------------------
# fibers


def fiber_rows(f: Correspondence, chart: np.ndarray, coord: np.ndarray,
               direction: str) -> np.ndarray:
    """Coefficient rows of the fiber polynomial over a batch of chart points.

    direction "backward": fiber in x over y-points (preimages, degree d2);
    "forward": fiber in y over x-points (images, degree d1).  Chart-1 points
    use the inverted-variable polynomial, so infinity needs no special case.
    """
    C = f.P.coeffs
    chart = np.asarray(chart)
    coord = np.asarray(coord, dtype=complex)
    if direction == "backward":
        K0, K1 = C.T, C[:, ::-1].T
    elif direction == "forward":
        K0, K1 = C, C[::-1, :]
    else:
        raise ValueError("direction must be 'backward' or 'forward'")
    n_pow = K0.shape[0]
    rows = np.empty((len(coord), K0.shape[1]), dtype=complex)
    m0 = chart == 0
    if np.any(m0):
        rows[m0] = np.vander(coord[m0], n_pow, increasing=True) @ K0
    if np.any(~m0):
        rows[~m0] = np.vander(coord[~m0], n_pow, increasing=True) @ K1
    return rows


def fiber_points(f: Correspondence, chart, coord, direction: str,
                 policy: NumericPolicy = DEFAULT_POLICY):
    """Projective fiber members for each input point: (vals, degenerate mask).

    vals has shape (N, d) with complex-infinity entries for fiber points at
    infinity (degree drops of the affine fiber polynomial).
    """
    rows = fiber_rows(f, np.atleast_1d(chart), np.atleast_1d(coord), direction)
    return batched_projective_roots(rows, policy=policy)


def graph_residual(f: Correspondence, pa, pb) -> float:
    """|P| at a point pair, evaluated in per-coordinate charts ((chart, w) pairs)."""
    ca, wa = pa
    cb, wb = pb
    C = f.P.coeffs
    if ca == 1:
        C = C[::-1, :]
    if cb == 1:
        C = C[:, ::-1]
    return float(np.abs(BiPoly(C, rel_tol=0.0)(wa, wb)))


# ---------------------------------------------------------------------------
# critical sets


@dataclass(frozen=True)
class CriticalValue:
    chart: int
    coord: complex
    kind: str                     # "ramification" | "component-crossing"
    multiplicity: int
    witness_chart: int
    witness_coord: complex

    @property
    def is_infinity(self) -> bool:
        return self.chart == 1 and self.coord == 0

    def as_extended(self) -> complex:
        return complex(sphere.from_chart(np.array([self.chart]), np.array([self.coord]))[0])


@dataclass(frozen=True)
class CriticalData:
    b1: tuple
    b2: tuple

    def includes_infinity(self, which: str) -> bool:
        vals = self.b1 if which == "b1" else self.b2
        return any(v.is_infinity for v in vals)


def _collision_values(P: BiPoly, policy: NumericPolicy):
    """Values t where the fiber {s : P(s, t) = 0} has a repeated projective point.

    Candidates come from the discriminant of the fiber variable and from the
    leading-coefficient locus (fibers reaching infinity); each candidate is
    verified by root-clustering of the actual projective fiber.  Witnesses
    are classified by the gradient of P at the repeated point: singular
    points of the curve are component crossings, smooth ones are genuine
    ramification.
    """
    a, b = P.deg_x, P.deg_y
    cand: list[tuple[int, complex]] = [(1, 0.0)]            # always check infinity
    if a >= 2:
        disc = discriminant(P, var="x", policy=policy)
        if disc.is_zero:
            raise CorrespondenceError("non-reduced graph: discriminant vanishes identically")
        if disc.degree >= 1:
            cand += [(0, r) if abs(r) <= 1 else (1, 1.0 / r)
                     for r, _ in roots(disc, tol=1e-8, policy=policy)]
    lead = UniPoly(P.coeffs[a, :])
    if lead.degree >= 1:
        cand += [(0, r) if abs(r) <= 1 else (1, 1.0 / r)
                 for r, _ in roots(lead, tol=1e-8, policy=policy)]

    # dedupe candidates on the sphere
    uniq: list[tuple[int, complex]] = []
    for ch, w in cand:
        if all(sphere.chordal(ch, w, ch2, w2) > 1e-7 for ch2, w2 in uniq):
            uniq.append((ch, complex(w)))

    f_stub = Correspondence(P=P, d1=b, d2=a)
    out = []
    for ch, w in uniq:
        vals, degen = fiber_points(f_stub, [ch], [w], "backward", policy=policy)
        if degen[0]:
            raise CorrespondenceError("identically zero fiber at a candidate critical value")
        clusters = _sphere_clusters(vals[0], policy)
        for center, mult in clusters:
            if mult < 2:
                continue
            wc_chart, wc = center
            kind = _witness_kind(P, wc_chart, wc, ch, w, policy)
            out.append(CriticalValue(chart=ch, coord=w, kind=kind, multiplicity=mult,
                                     witness_chart=wc_chart, witness_coord=wc))
            break   # one witness per value is enough to certify membership
    return tuple(out)


def _sphere_clusters(vals: np.ndarray, policy: NumericPolicy):
    """Cluster projective fiber points by chordal distance (radius ~ sqrt tol)."""
    pts = []
    n_inf = 0
    for v in vals:
        if np.isfinite(v.real) and np.isfinite(v.imag):
            pts.append(v)
        else:
            n_inf += 1
    radius = max(policy.cluster_tol, 1e-6)
    clusters: list[list[complex]] = []
    for v in pts:
        placed = False
        for cl in clusters:
            c = sum(cl) / len(cl)
            if sphere.chordal_points(v, c) <= radius:
                cl.append(v)
                placed = True
                break
        if not placed:
            clusters.append([v])
    out = []
    for cl in clusters:
        c = sum(cl) / len(cl)
        ch, w = sphere.to_chart(c)
        out.append(((int(ch[0]), complex(w[0])), len(cl)))
    if n_inf:
        out.append(((1, 0.0), n_inf))
    return out


def _witness_kind(P: BiPoly, x_chart: int, x: complex, y_chart: int, y: complex,
                  policy: NumericPolicy) -> str:
    C = P.coeffs
    if x_chart == 1:
        C = C[::-1, :]
    if y_chart == 1:
        C = C[:, ::-1]
    S = BiPoly(C, rel_tol=0.0)
    gx = abs(complex(S.partial_x()(x, y)))
    gy = abs(complex(S.partial_y()(x, y)))
    scale = S.scale()
    return "component-crossing" if max(gx, gy) <= policy.sing_tol * scale else "ramification"


def critical_values(f: Correspondence, policy: NumericPolicy = DEFAULT_POLICY) -> CriticalData:
    """Critical data of both projections, verified on actual fibers.

    b2 holds the values over which inverse branches of f collide (fiber in x
    repeats), b1 the same for forward branches (fiber in y repeats).  Each
    entry carries a witness ramification point of the graph and a kind flag:
    component crossings have repeated fiber points but unramified germs.
    """
    b2 = _collision_values(f.P, policy)
    b1 = _collision_values(f.P.transpose(), policy)
    return CriticalData(b1=b1, b2=b2)


def delta_bound(f: Correspondence, data: CriticalData | None = None,
                policy: NumericPolicy = DEFAULT_POLICY) -> int:
    """Upper bound d ** #B2 for the maximal local degree of iterated germs.

    Uses the affine-plus-infinity count of B2; intended after
    critical_orbit_report confirms no periodic critical value.
    """
    if data is None:
        data = critical_values(f, policy=policy)
    return int(f.d2 ** len(data.b2))


# ---------------------------------------------------------------------------
# critical orbits


@dataclass(frozen=True)
class CriticalOrbitEntry:
    value: CriticalValue
    periodic_detected: bool
    certified: bool
    min_return_distance: float
    returning_path: tuple | None
    inconclusive: bool


@dataclass(frozen=True)
class CriticalOrbitReport:
    entries: tuple
    horizon: int
    tol_periodic: float

    @property
    def any_certified_periodic(self) -> bool:
        return any(e.certified for e in self.entries)

    @property
    def certified_periodic_ramification(self) -> bool:
        return any(e.certified and e.value.kind == "ramification" for e in self.entries)

    @property
    def hypothesis_unverified(self) -> bool:
        """True when the no-periodic-critical-value hypothesis fails or is undecidable.

        Component-crossing values have unramified germs, so only certified
        returns of ramification-kind values (or truncated searches) block the
        hypothesis.
        """
        return (self.certified_periodic_ramification
                or any(e.inconclusive for e in self.entries))


def critical_orbit_report(f: Correspondence, horizon: int = 12,
                          tol_periodic: float | None = None,
                          data: CriticalData | None = None,
                          policy: NumericPolicy = DEFAULT_POLICY) -> CriticalOrbitReport:
    """Breadth-first forward orbits of the critical values of f.

    A value is periodic_detected when some branch path of length <= horizon
    returns within tol_periodic of it; the return is certified only when the
    closing step satisfies the graph equation algebraically (residual below
    policy.certify_tol).  Exceeding the point cap flags the entry
    inconclusive rather than raising.
    """
    if tol_periodic is None:
        tol_periodic = policy.tol_periodic
    if data is None:
        data = critical_values(f, policy=policy)
    entries = []
    for cv in data.b2:
        entries.append(_orbit_entry(f, cv, horizon, tol_periodic, policy))
    return CriticalOrbitReport(entries=tuple(entries), horizon=horizon,
                               tol_periodic=tol_periodic)


def _orbit_entry(f, cv: CriticalValue, horizon: int, tol_periodic: float,
                 policy: NumericPolicy) -> CriticalOrbitEntry:
    charts = [cv.chart]
    coords = [cv.coord]
    parents = [-1]
    frontier = [0]
    min_dist = np.inf
    best_path = None
    certified = False
    inconclusive = False
    for _ in range(horizon):
        if not frontier:
            break
        vals, degen = fiber_points(f, np.array([charts[i] for i in frontier], dtype=np.uint8),
                                   np.array([coords[i] for i in frontier], dtype=complex),
                                   "forward", policy=policy)
        if np.any(degen):
            raise CorrespondenceError("degenerate fiber met while expanding a critical orbit")
        new_frontier = []
        flat = vals.reshape(-1)
        flat_parent = np.repeat(frontier, vals.shape[1])
        ch, w = sphere.to_chart(flat)
        for k in range(len(flat)):
            d_ret = float(sphere.chordal(ch[k], w[k], cv.chart, cv.coord))
            if d_ret < min_dist:
                min_dist = d_ret
            if d_ret <= tol_periodic and best_path is None:
                best_path = (_path_to(charts, coords, parents, int(flat_parent[k]))
                             + ((int(ch[k]), complex(w[k])),))
            # dedupe against everything already stored (handles cycles)
            d_all = sphere.chordal(ch[k], w[k], np.array(charts), np.array(coords))
            if np.min(d_all) <= policy.orbit_dedup_tol:
                continue
            charts.append(int(ch[k]))
            coords.append(complex(w[k]))
            parents.append(int(flat_parent[k]))
            new_frontier.append(len(charts) - 1)
        if len(charts) > policy.orbit_point_cap:
            inconclusive = True
            break
        frontier = new_frontier
    detected = best_path is not None
    if detected:
        certified = _certify_path(f, best_path, (cv.chart, cv.coord), policy)
    return CriticalOrbitEntry(value=cv, periodic_detected=detected, certified=certified,
                              min_return_distance=float(min_dist),
                              returning_path=best_path, inconclusive=inconclusive)


def _path_to(charts, coords, parents, idx):
    path = []
    while idx >= 0:
        path.append((charts[idx], coords[idx]))
        idx = parents[idx]
    return tuple(reversed(path))


def _certify_path(f, path, start, policy: NumericPolicy) -> bool:
    """Algebraic check: every step satisfies P = 0, with the return point
    replaced by the critical value itself."""
    pts = list(path)
    pts[-1] = start
    for a, b in zip(pts[:-1], pts[1:]):
        if graph_residual(f, a, b) > policy.certify_tol:
            return False
    return True


# ---------------------------------------------------------------------------
# serialization


def to_record(f: Correspondence) -> dict:
    rec = {
        "bidegree": [f.P.deg_x, f.P.deg_y],
        "coeffs": [[float(c.real), float(c.imag)] for c in f.P.coeffs.ravel()],
    }
    if f.factors is not None:
        rec["factors"] = [{
            "bidegree": [p.deg_x, p.deg_y],
            "coeffs": [[float(c.real), float(c.imag)] for c in p.coeffs.ravel()],
            "multiplicity": m,
        } for p, m in f.factors]
    return rec


def _poly_from_record(rec: dict) -> BiPoly:
    a, b = rec["bidegree"]
    flat = np.array([complex(re, im) for re, im in rec["coeffs"]])
    if flat.size != (a + 1) * (b + 1):
        raise CorrespondenceError("coefficient list does not match bidegree")
    return BiPoly(flat.reshape(a + 1, b + 1), rel_tol=0.0)


def from_record(rec: dict, policy: NumericPolicy = DEFAULT_POLICY) -> Correspondence:
    P = _poly_from_record(rec)
    factors = None
    if "factors" in rec:
        factors = [(_poly_from_record(fr), fr.get("multiplicity", 1)) for fr in rec["factors"]]
    f = from_bipoly(P, factors=factors, policy=policy)
    roundtrip = _poly_from_record(to_record(f))
    if not np.array_equal(roundtrip.coeffs, f.P.coeffs):
        raise CorrespondenceError("serialization round trip is not bit-exact")
    return f


def to_text(f: Correspondence) -> str:
    return json.dumps(to_record(f), sort_keys=True, separators=(",", ":"))


def from_text(text: str, policy: NumericPolicy = DEFAULT_POLICY) -> Correspondence:
    return from_record(json.loads(text), policy=policy)


def content_hash(f: Correspondence) -> str:
    return hashlib.sha256(to_text(f).encode()).hexdigest()

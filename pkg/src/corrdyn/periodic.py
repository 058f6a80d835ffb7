"""Periodic points of iterated correspondences, with multipliers and classes.

Periodic points of order n are the intersection of the iterated graph with
the diagonal.  Diagonal components of the graph are divided out first (in
the sheared frame u = x, v = y - x, where they are exactly the v-content);
what remains is root-solved in both charts, so points at infinity are
counted too.  At smooth intersection points the multiplier is the implicit
germ derivative dy/dx; at singular ones the tangent slopes of the lowest
homogeneous form give one multiplier per crossing germ.  The germ slope in
the inverted chart is already the multiplier of a fixed point at infinity,
so no further transformation is applied there.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import sphere
from .algebra import UniPoly, roots
from .correspondence import Correspondence, CorrespondenceError, content_hash, iterate
from .measures import TestFunction, pair
from .policy import DEFAULT_POLICY, NumericPolicy
from .sphere import SphereGrid
from .transport import GridField, backward_cloud, pullback_form


@dataclass(frozen=True)
class PeriodicPoint:
    chart: int
    coord: complex
    period: int
    multiplier: complex          # complex inf for vertical germs
    multiplicity: int
    kind: str                    # repelling | attracting | neutral
    residual: float

    def as_extended(self) -> complex:
        return complex(sphere.from_chart(np.array([self.chart]), np.array([self.coord]))[0])


def _shear_to_diagonal_frame(C: np.ndarray) -> np.ndarray:
    """Coefficients of P(x, x + v) as a matrix in (x, v)."""
    a, b = C.shape[0] - 1, C.shape[1] - 1
    out = np.zeros((a + b + 1, b + 1), dtype=complex)
    for j in range(b + 1):
        col = C[:, j]
        for m in range(j + 1):
            out[: len(col) + j - m, m] += np.pad(col, (j - m, 0)) * comb(j, m)
    return out


def _diagonal_multiplicity(D: np.ndarray, rel_tol: float) -> int:
    scale = np.max(np.abs(D))
    k = 0
    while k < D.shape[1] - 1 and np.max(np.abs(D[:, k])) <= rel_tol * scale:
        k += 1
    return k


def _classify(mult: complex, tol_neutral: float) -> str:
    if not np.isfinite(mult.real) or not np.isfinite(mult.imag):
        return "repelling"
    m = abs(mult)
    if m > 1.0 + tol_neutral:
        return "repelling"
    if m < 1.0 - tol_neutral:
        return "attracting"
    return "neutral"


def _taylor_shift(c: np.ndarray, x0: complex) -> np.ndarray:
    """Coefficients of p(x0 + t) in t (synthetic-division cascade)."""
    out = np.asarray(c, dtype=complex).copy()
    n = len(out)
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            out[j] += x0 * out[j + 1]
    return out


def _germ_multipliers(D: np.ndarray, x0: complex, policy: NumericPolicy):
    """Multipliers of the germs of the sheared curve D(x, v) at (x0, 0).

    Smooth point: dy/dx = 1 + dv/dx with dv/dx = -D_x/D_v.  Singular point:
    one slope per root of the lowest homogeneous form, so every crossing
    germ reports its own multiplier; missing degrees are vertical tangents.
    """
    scale = np.max(np.abs(D))
    cols = [UniPoly(D[:, j], rel_tol=0.0) for j in range(D.shape[1])]
    gx = complex(cols[0].derivative()(x0))
    gv = complex(cols[1](x0)) if len(cols) > 1 else 0.0
    if max(abs(gx), abs(gv)) > policy.sing_tol * scale:
        if abs(gv) <= policy.sing_tol * scale:
            return [complex(np.inf, 0.0)]
        return [1.0 - gx / gv]
    taylor = np.zeros_like(D)
    for j, col in enumerate(cols):
        shifted = _taylor_shift(col.coeffs, x0)
        taylor[: len(shifted), j] = shifted
    for M in range(1, D.shape[0] + D.shape[1]):
        h = np.array([taylor[M - q, q] if 0 <= M - q < taylor.shape[0]
                      and q < taylor.shape[1] else 0.0
                      for q in range(M + 1)], dtype=complex)
        if np.max(np.abs(h)) > policy.sing_tol * scale:
            hp = UniPoly(h)
            slopes = [r for r, mm in roots(hp, tol=1e-6, policy=policy) for _ in range(mm)]
            mults = [1.0 + s for s in slopes]
            mults += [complex(np.inf, 0.0)] * (M - hp.degree)   # vertical tangents
            return mults
    return [complex(np.nan, np.nan)]


def periodic_points(f: Correspondence, n: int, tol: float = 1e-8,
                    policy: NumericPolicy = DEFAULT_POLICY):
    """Isolated periodic points of order n with multipliers, both charts.

    Total multiplicity equals d1(f^n) + d2(f^n) minus twice the removed
    diagonal multiplicity (the intersection number of the graph with the
    diagonal class).
    """
    fn = iterate(f, n, policy=policy) if n > 1 else f
    pts: list[tuple[int, complex, int, complex, float]] = []
    for chart in (0, 1):
        C = fn.P.coeffs if chart == 0 else fn.P.coeffs[::-1, ::-1]
        D = _shear_to_diagonal_frame(C)
        k_diag = _diagonal_multiplicity(D, policy.trim_rel_tol)
        D = D[:, k_diag:]
        q = UniPoly(D[:, 0])
        if q.is_zero or (k_diag > 0 and q.degree == 0 and D.shape[1] == 1):
            raise CorrespondenceError(
                "graph contains the diagonal with full multiplicity; "
                "refusing to guess the isolated part")
        for r, m in roots(q.normalized(), tol=max(tol, 1e-10), policy=policy):
            keep = (abs(r) <= 1.0) if chart == 0 else (abs(r) < 1.0 - 1e-12)
            if not keep:
                continue
            res = float(abs(q.normalized()(r)))
            mults = _germ_multipliers(D, r, policy)
            if len(mults) == m:
                for mm in mults:
                    pts.append((chart, complex(r), 1, complex(mm), res))
            else:
                pts.append((chart, complex(r), m, complex(mults[0]), res))
    merged: list[tuple] = []
    for chart, r, m, mm, res in pts:
        dup = False
        for c2, r2, m2, mm2, _ in merged:
            if c2 != chart and sphere.chordal(chart, r, c2, r2) < 1e-8 \
               and abs(abs(mm2) - abs(mm)) < 1e-6:
                dup = True
                break
        if not dup:
            merged.append((chart, r, m, mm, res))
    return [PeriodicPoint(chart=c, coord=r, period=n, multiplier=mm, multiplicity=m,
                          kind=_classify(mm, policy.tol_neutral), residual=res)
            for c, r, m, mm, res in merged]


def periodic_count_with_multiplicity(points) -> int:
    return int(sum(p.multiplicity for p in points))


def periodic_table(points) -> str:
    """Structured text rows: re im chart period mult_re mult_im multiplicity class."""
    lines = ["# re im chart period multiplier_re multiplier_im multiplicity class"]
    for p in points:
        lines.append(f"{p.coord.real:.17g} {p.coord.imag:.17g} {p.chart} {p.period} "
                     f"{p.multiplier.real:.17g} {p.multiplier.imag:.17g} "
                     f"{p.multiplicity} {p.kind}")
    return "\n".join(lines) + "\n"


def graph_pairing(f: Correspondence, n: int, phi: TestFunction,
                  psi_budget: int = 100000, seed: int = 0, grid_res: int = 128,
                  policy: NumericPolicy = DEFAULT_POLICY) -> dict:
    """Pairing of the normalized iterated-graph current against split test forms.

    lhs: the graph current paired with pi1*phi ^ pi2*omega, computed by
    sampling the area form into a quadrature cloud, transporting it down the
    backward chain and pairing with phi.  rhs: the same pairing against an
    independent deeper empirical measure (shifted seed).  The two converge
    as n grows.
    """
    g = SphereGrid(grid_res)
    alpha = GridField(g, np.ones((g.res, g.res)), kind="function")
    cloud = pullback_form(f, alpha, n, budget=psi_budget, seed=seed, policy=policy)
    lhs = pair(cloud, phi)
    gsd = np.random.Generator(np.random.Philox(key=np.uint64(seed + 977)))
    a0 = complex(gsd.normal() * 0.3, gsd.normal() * 0.3)
    mu_emp = backward_cloud(f, a0, n + 6, max_atoms=psi_budget, seed=seed + 1, policy=policy)
    rhs = pair(mu_emp, phi)
    return {"lhs": lhs, "rhs": rhs, "n": n, "c_psi": 1.0,
            "correspondence": content_hash(f)}

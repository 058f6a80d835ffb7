"""Transport operators: orbit clouds, the transfer operator, one-form pullback.

Backward clouds realize the normalized pullbacks d^{-n} (f^n)* delta_a by
expanding the full preimage tree while it fits the atom budget and switching
to a stratified Monte-Carlo chain beyond (each particle picks one of the d
preimages uniformly with multiplicity, keeping equal weights, so both modes
target the same measure).  Randomness is counter-based: the generator for a
step is keyed by (seed, step), and particle order is fixed, which makes every
cloud bit-reproducible.

One-form fields are pulled back branch by branch with implicit derivatives;
nodes near the branch-collision locus are masked, and a power iteration of
the normalized operator estimates its contraction factor, which detects weak
modularity (estimates within 0.02 of 1 are suspicious).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sphere
from .algebra import BiPoly, batched_projective_roots
from .correspondence import (
    Correspondence,
    adjoint,
    conjugate,
    content_hash,
    critical_values,
    fiber_points,
    fiber_rows,
)
from .policy import DEFAULT_POLICY, NumericPolicy
from .pointcloud import PointCloudMeasure
from .sphere import SphereGrid


class TransportError(RuntimeError):
    pass


def step_rng(seed: int, step: int) -> np.random.Generator:
    """Counter-based generator for one transport step (bit-stable)."""
    return np.random.Generator(np.random.Philox(
        key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
        counter=[0, 0, 0, np.uint64(step & 0xFFFFFFFFFFFFFFFF)]))


@dataclass(frozen=True)
class BranchPath:
    """One branch of order n: points (chart, coord) with per-step graph residuals.

    Forward paths satisfy P(x_j, x_{j+1}) ~ 0, backward ones P(x_{j+1}, x_j);
    the weight of a uniformly sampled path is d^(-n).
    """

    points: tuple
    direction: str
    residuals: tuple
    weight: float

    def __len__(self):
        return len(self.points) - 1


def sample_branch_path(f: Correspondence, a, n: int, seed: int = 0,
                       direction: str = "forward",
                       policy: NumericPolicy = DEFAULT_POLICY) -> BranchPath:
    """Uniformly sampled branch of order n starting at a (weight d^-n)."""
    from .correspondence import graph_residual

    ch, co = sphere.to_chart(np.asarray([a], dtype=complex))
    pts = [(int(ch[0]), complex(co[0]))]
    d = f.d1 if direction == "forward" else f.d2
    for step in range(1, n + 1):
        vals, degen = fiber_points(f, [pts[-1][0]], [pts[-1][1]], direction, policy=policy)
        if degen[0]:
            raise TransportError("degenerate fiber while sampling a branch path")
        u = step_rng(seed, step).random(1)[0]
        pick = vals[0][min(int(u * vals.shape[1]), vals.shape[1] - 1)]
        c2, w2 = sphere.to_chart(np.asarray([pick]))
        pts.append((int(c2[0]), complex(w2[0])))
    res = []
    for (pa, pb) in zip(pts[:-1], pts[1:]):
        res.append(graph_residual(f, pa, pb) if direction == "forward"
                   else graph_residual(f, pb, pa))
    return BranchPath(points=tuple(pts), direction=direction,
                      residuals=tuple(res), weight=float(d) ** (-n))


# ---------------------------------------------------------------------------
# Dirac transport


def pullback_dirac(f: Correspondence, a,
                   policy: NumericPolicy = DEFAULT_POLICY) -> PointCloudMeasure:
    """Normalized pullback of a point mass: preimages with weights 1/d2.

    Multiplicities appear as repeated atoms; degree drops of the affine fiber
    place atoms at infinity, so no chart rotation is needed for generic a.
    """
    ch, w = sphere.to_chart(np.asarray([a], dtype=complex))
    vals, degen = fiber_points(f, ch, w, "backward", policy=policy)
    if degen[0]:
        raise TransportError("identically zero fiber: degenerate base point")
    c2, w2 = sphere.to_chart(vals[0])
    n = len(w2)
    return PointCloudMeasure(c2, w2, np.full(n, 1.0 / n),
                             {"op": "pullback_dirac", "correspondence": content_hash(f)})


def _chain(f: Correspondence, chart, coord, weight, n: int, max_atoms: int,
           seed: int, snapshots, policy: NumericPolicy):
    """Backward transport chain; returns {n_k: (chart, coord, weight, mode)}."""
    chart = np.asarray(chart, dtype=np.uint8).copy()
    coord = np.asarray(coord, dtype=complex).copy()
    weight = np.asarray(weight, dtype=float).copy()
    out = {}
    mode = "exact"
    if 0 in snapshots:
        out[0] = (chart.copy(), coord.copy(), weight.copy(), mode)
    for step in range(1, n + 1):
        rows = fiber_rows(f, chart, coord, "backward")
        vals, degen = batched_projective_roots(rows, policy=policy)
        if np.any(degen):
            raise TransportError("degenerate fiber during transport")
        N, d = vals.shape
        if N * d <= max_atoms:
            flat = vals.reshape(-1)
            chart, coord = sphere.to_chart(flat)
            weight = np.repeat(weight, d) / d
        else:
            mode = "mc"
            u = step_rng(seed, step).random(N)
            idx = np.minimum((u * d).astype(int), d - 1)
            chosen = vals[np.arange(N), idx]
            chart, coord = sphere.to_chart(chosen)
        if step in snapshots:
            out[step] = (chart.copy(), coord.copy(), weight.copy(), mode)
    return out


def _run_chain_with_rotations(f, a_chart, a_coord, a_weight, n, max_atoms, seed,
                              snapshots, policy):
    """Retry under random sphere rotations if a degenerate fiber is met."""
    try:
        return _chain(f, a_chart, a_coord, a_weight, n, max_atoms, seed, snapshots, policy), None
    except TransportError:
        pass
    for attempt in range(3):
        M = sphere.random_rotation(seed * 7919 + attempt + 1)
        Minv = sphere.mobius_inverse(M)
        g = conjugate(f, M, policy=policy)
        ch, co = sphere.mobius_apply(Minv, a_chart, a_coord)
        try:
            raw = _chain(g, ch, co, a_weight, n, max_atoms, seed, snapshots, policy)
        except TransportError:
            continue
        mapped = {}
        for k, (c, w, wt, mode) in raw.items():
            c2, w2 = sphere.mobius_apply(M, c, w)
            mapped[k] = (c2, w2, wt, mode)
        return mapped, attempt + 1
    raise TransportError("repeated fiber degeneracy after 3 chart rotations")


def backward_cloud_series(f: Correspondence, a, n_values, max_atoms: int = 100000,
                          seed: int = 0, policy: NumericPolicy = DEFAULT_POLICY):
    """Snapshots of one coupled backward chain at several depths.

    All snapshots share the chain's randomness, which is what the rate
    diagnostics want (a deeper snapshot serves as the reference measure).
    """
    n_values = sorted(set(int(k) for k in n_values))
    ch, co = sphere.to_chart(np.asarray([a], dtype=complex))
    raw, rotated = _run_chain_with_rotations(
        f, ch, co, np.array([1.0]), max(n_values), max_atoms, seed, set(n_values), policy)
    h = content_hash(f)
    out = {}
    for k in n_values:
        c, w, wt, mode = raw[k]
        meta = {"op": "backward_cloud", "n": k, "seed": seed, "budget": max_atoms,
                "mode": mode, "correspondence": h}
        if rotated:
            meta["rotations"] = rotated
        out[k] = PointCloudMeasure(c, w, wt, meta)
    return out


def backward_cloud(f: Correspondence, a, n: int, max_atoms: int = 100000,
                   seed: int = 0, policy: NumericPolicy = DEFAULT_POLICY) -> PointCloudMeasure:
    """Cloud approximating d^{-n} (f^n)* delta_a (exact tree, then Monte Carlo)."""
    return backward_cloud_series(f, a, [n], max_atoms, seed, policy)[n]


def forward_cloud(f: Correspondence, a, n: int, max_atoms: int = 100000,
                  seed: int = 0, policy: NumericPolicy = DEFAULT_POLICY) -> PointCloudMeasure:
    """Cloud approximating d^{-n} (f^n)_* delta_a; the backward cloud of the adjoint."""
    cloud = backward_cloud(adjoint(f), a, n, max_atoms, seed, policy)
    cloud.meta["op"] = "forward_cloud"
    cloud.meta["correspondence"] = content_hash(f)
    return cloud


# ---------------------------------------------------------------------------
# grid fields


@dataclass
class GridField:
    """Function or (1,0)-form coefficient sampled on a SphereGrid.

    For kind "oneform" the values are the coefficient u of u(z) dz in the
    standard chart; norms carry the Fubini-Study metric factor.  `mask`
    flags nodes excluded near the critical set (their quadrature weight is
    zero) and masked_fraction records how much area that removed.
    """

    grid: SphereGrid
    values: np.ndarray
    kind: str = "function"
    mask: np.ndarray | None = None
    masked_fraction: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).reshape(self.grid.res, self.grid.res)

    def copy_with(self, values) -> "GridField":
        return GridField(self.grid, values, self.kind, self.mask, self.masked_fraction)


def uniform_form(grid: SphereGrid) -> GridField:
    """The normalized area form as a function-weighted density (all ones)."""
    return GridField(grid, np.ones((grid.res, grid.res)), kind="function")


def field_norm(fld: GridField) -> float:
    """Quadrature L2 norm; one-forms use the Fubini-Study metric factor."""
    g = fld.grid
    w = np.full((g.res, g.res), g.weight)
    if fld.mask is not None:
        w = np.where(fld.mask, 0.0, w)
    if fld.kind == "oneform":
        dens = (g.metric ** 2) * np.abs(fld.values) ** 2
        return float(np.sqrt(2.0 * np.pi * np.sum(w * dens)))
    return float(np.sqrt(np.sum(w * np.abs(fld.values) ** 2)))


def random_oneform(grid: SphereGrid, seed: int = 0, degree: int = 3) -> GridField:
    """Seeded smooth one-form field: low-order embedding polynomial over metric."""
    g = step_rng(seed, 0)
    xyz = sphere.embed(grid.node_chart, grid.node_coord).reshape(grid.res, grid.res, 3)
    h = np.zeros((grid.res, grid.res), dtype=complex)
    for p in range(degree + 1):
        for q in range(degree + 1 - p):
            for r in range(degree + 1 - p - q):
                c = g.normal() + 1j * g.normal()
                h += c * xyz[..., 0] ** p * xyz[..., 1] ** q * xyz[..., 2] ** r
    return GridField(grid, h / grid.metric, kind="oneform")


def transfer_apply(f: Correspondence, h: GridField,
                   policy: NumericPolicy = DEFAULT_POLICY) -> GridField:
    """Transfer operator: (1/d2) sum of h over the preimages of each node.

    h is evaluated at preimages by bilinear interpolation on its own grid;
    constants are preserved exactly up to interpolation error.  Nodes whose
    fiber degenerates numerically are recomputed under a random rotation.
    """
    if h.kind != "function":
        raise TransportError("transfer_apply expects a function field")
    g = h.grid
    vals, degen = fiber_points(f, g.node_chart, g.node_coord, "backward", policy=policy)
    if np.any(degen):
        vals = vals.copy()
        idx = np.nonzero(degen)[0]
        vals[idx] = _rotated_fiber(f, g.node_chart[idx], g.node_coord[idx],
                                   "backward", policy)
    ch, w = sphere.to_chart(vals.reshape(-1))
    hv = g.interpolate(h.values, ch, w).reshape(vals.shape)
    out = hv.mean(axis=1).reshape(g.res, g.res)
    return GridField(g, out, kind="function", mask=h.mask, masked_fraction=h.masked_fraction)


def _rotated_fiber(f: Correspondence, chart, coord, direction, policy) -> np.ndarray:
    """Fiber members recomputed after a random coordinate rotation."""
    for attempt in range(3):
        M = sphere.random_rotation(4242 + attempt)
        g2 = conjugate(f, M, policy=policy)
        ch2, co2 = sphere.mobius_apply(sphere.mobius_inverse(M), chart, coord)
        vals, degen = fiber_points(g2, ch2, co2, direction, policy=policy)
        if not np.any(degen):
            c3, w3 = sphere.to_chart(vals.reshape(-1))
            c4, w4 = sphere.mobius_apply(M, c3, w3)
            return sphere.from_chart(c4, w4).reshape(vals.shape)
    raise TransportError("repeated fiber degeneracy after 3 chart rotations")


# ---------------------------------------------------------------------------
# one-form pullback


def critical_mask(f: Correspondence, grid: SphereGrid, side: str = "pullback",
                  policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Nodes within r_crit (chart units) of the branch-collision locus.

    Pullback sums forward branches, which collide over B1; pushforward is the
    adjoint pullback and uses B2.  The implicit branch derivative blows up
    like dist^(-1+1/m) there, and closer than ~1/sqrt(res) the grid cannot
    separate the colliding branches at all (spike modes pile up coherently
    and fake operator growth), so both scales are excluded from quadrature.
    The masked area still vanishes as the resolution grows.
    """
    data = critical_values(f, policy=policy)
    pts = data.b1 if side == "pullback" else data.b2
    r_crit = max(policy.crit_mask_factor / grid.res,
                 policy.crit_mask_sqrt / np.sqrt(grid.res))
    mask = np.zeros(grid.n_nodes, dtype=bool)
    z = grid.z.ravel()
    for v in pts:
        if v.chart == 0:
            d = np.abs(z - v.coord)
        else:
            with np.errstate(divide="ignore"):
                d = np.abs(1.0 / z - v.coord)
        mask |= d < r_crit
    return mask.reshape(grid.res, grid.res)


def _eval_partials_ratio(f: Correspondence, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Branch derivative dy/dx = -P_x / P_y at finite points (x, y)."""
    Px = f.P.partial_x()
    Py = f.P.partial_y()
    num = Px(x, y)
    den = Py(x, y)
    bad = np.abs(den) < 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -num / np.where(bad, 1.0, den)
    out[bad] = 0.0
    return out


def oneform_pullback(f: Correspondence, u: GridField,
                     policy: NumericPolicy = DEFAULT_POLICY) -> GridField:
    """Sum of branch pullbacks u(y_j(x)) y_j'(x) over the forward branches.

    Branches through infinity are routed through the inverted chart (the
    transformed coefficient -u z^2 stays bounded there for honest one-forms).
    Nodes near the collision locus are masked; more than a 20% masked
    fraction means the grid cannot resolve the critical set.
    """
    if u.kind != "oneform":
        raise TransportError("oneform_pullback expects a one-form field")
    g = u.grid
    mask = u.mask if u.mask is not None else critical_mask(f, g, "pullback", policy)
    frac = float(np.mean(mask))
    if frac > policy.mask_fraction_limit:
        raise TransportError(f"grid too coarse near critical set ({frac:.0%} masked)")

    grid_x = g.z.ravel()
    vals, degen = fiber_points(f, g.node_chart, g.node_coord, "forward", policy=policy)
    if np.any(degen):
        raise TransportError("degenerate fiber at a grid node")
    N, d = vals.shape
    xb = np.broadcast_to(grid_x[:, None], (N, d))

    finite = np.isfinite(vals.real) & np.isfinite(vals.imag)
    contrib = np.zeros((N, d), dtype=complex)

    if np.any(finite):
        yf = np.where(finite, vals, 0.0)
        dy = _eval_partials_ratio(f, xb, yf)
        ch, w = sphere.to_chart(yf.reshape(-1))
        uy = g.interpolate(u.values, ch, w).reshape(N, d)
        contrib[finite] = (uy * dy)[finite]

    if np.any(~finite):
        # branch value at infinity: use v = 1/y; coefficient transforms to -u z^2
        P_mix = BiPoly(f.P.coeffs[:, ::-1], rel_tol=0.0)
        Pmx = P_mix.partial_x()
        Pmv = P_mix.partial_y()
        idx = np.nonzero(~finite)
        xs = xb[idx]
        num = Pmx(xs, np.zeros_like(xs))
        den = Pmv(xs, np.zeros_like(xs))
        ok = np.abs(den) > 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            vprime = -np.where(ok, num / np.where(ok, den, 1.0), 0.0)
        util_values = -u.values * (g.z ** 2)
        uv = g.interpolate(util_values, np.ones(len(xs), dtype=np.uint8), np.zeros(len(xs), dtype=complex))
        contrib[idx] = uv * vprime

    out = contrib.sum(axis=1).reshape(g.res, g.res)
    out = np.where(mask, 0.0, out)
    return GridField(g, out, kind="oneform", mask=mask, masked_fraction=frac)


def oneform_pushforward(f: Correspondence, u: GridField,
                        policy: NumericPolicy = DEFAULT_POLICY) -> GridField:
    """Pushforward on one-forms: the pullback by the adjoint correspondence."""
    return oneform_pullback(adjoint(f), u, policy=policy)


def operator_norm_estimate(f: Correspondence, direction: str = "pullback",
                           iters: int = 25, resolution: int = 256, seed: int = 0,
                           policy: NumericPolicy = DEFAULT_POLICY) -> dict:
    """Power iteration of the normalized one-form operator (1/d) f* or (1/d) f_*.

    Returns the geometric mean of the last five growth ratios as the
    contraction estimate plus the full history.  Estimates within 0.02 of 1
    are flagged as suspected weak modularity (unions of isometries attain the
    norm bound with aligned branch pullbacks).
    """
    if iters < 10:
        raise ValueError("need at least 10 iterations")
    grid = SphereGrid(resolution)
    if direction == "pullback":
        op_f, d = f, f.d1
    elif direction == "pushforward":
        op_f, d = adjoint(f), f.d2
    else:
        raise ValueError("direction must be 'pullback' or 'pushforward'")
    mask = critical_mask(op_f, grid, "pullback", policy)
    frac = float(np.mean(mask))
    if frac > policy.mask_fraction_limit:
        raise TransportError(f"grid too coarse near critical set ({frac:.0%} masked)")

    g = step_rng(seed, 0)
    vals = (g.normal(size=(resolution, resolution))
            + 1j * g.normal(size=(resolution, resolution))) / grid.metric
    u = GridField(grid, np.where(mask, 0.0, vals), kind="oneform", mask=mask,
                  masked_fraction=frac)
    nrm = field_norm(u)
    u = u.copy_with(u.values / nrm)
    history = []          # growth ratios, feeding the estimate
    norm_history = []     # cumulative norms of the unnormalized iterates
    collapsed = False
    acc = 1.0
    for _ in range(iters):
        v = oneform_pullback(op_f, u, policy=policy)
        v = v.copy_with(v.values / d)
        r = field_norm(v)
        if not np.isfinite(r):
            raise TransportError("power iteration produced non-finite norms")
        history.append(r)
        acc *= r
        norm_history.append(acc)
        if r <= 1e-14:
            # supports contracted into the masked region: the discretized
            # operator is nilpotent at this resolution
            collapsed = True
            break
        u = v.copy_with(v.values / r)
    tail = history[-5:]
    est = 0.0 if collapsed else float(np.exp(np.mean(np.log(tail))))
    return {
        "norm_estimate": est,
        "history": history,
        "norm_history": norm_history,
        "masked_fraction": frac,
        "direction": direction,
        "resolution": resolution,
        "seed": seed,
        "collapsed": collapsed,
        "weak_modularity_suspected": abs(est - 1.0) <= 0.02,
    }


# ---------------------------------------------------------------------------
# form pullback by sampling


def pullback_form(f: Correspondence, alpha: GridField, n: int, budget: int = 100000,
                  seed: int = 0, policy: NumericPolicy = DEFAULT_POLICY) -> PointCloudMeasure:
    """Backward transport of an area form: d^{-n} (f^n)* alpha, normalized.

    Quadrature nodes are sampled proportionally to the alpha-mass and each
    sample is transported down the backward chain; the mixture (mass 1, the
    integral of alpha factored out) approximates the canonical measure for
    large n.
    """
    dens = alpha.values.real.ravel()
    if np.any(dens < -1e-12):
        raise TransportError("form density must be nonnegative")
    total = float(np.sum(dens))
    if total <= 0:
        raise TransportError("zero total mass")
    p = np.clip(dens, 0.0, None) / np.clip(dens, 0.0, None).sum()
    g = step_rng(seed, 2 ** 40)
    picks = g.choice(alpha.grid.n_nodes, size=budget, replace=True, p=p)
    ch = alpha.grid.node_chart[picks]
    co = alpha.grid.node_coord[picks]
    wt = np.full(budget, 1.0 / budget)
    raw, rotated = _run_chain_with_rotations(f, ch, co, wt, n, budget, seed, {n}, policy)
    c, w, wts, mode = raw[n]
    meta = {"op": "pullback_form", "n": n, "seed": seed, "budget": budget,
            "mode": mode, "correspondence": content_hash(f)}
    return PointCloudMeasure(c, w, wts, meta)

"""Complex polynomial arithmetic: roots, resultants, discriminants.

Univariate polynomials are coefficient vectors indexed by power; bivariate
ones are coefficient matrices c[i, j] (i = x-power, j = y-power).  All
solvers are floating point: roots come from companion-matrix eigenvalues
with Newton polish, resultants from Sylvester determinants evaluated on
Fourier grids and recovered by FFT.  Coefficients are renormalized to unit
max modulus after every operation, otherwise iterated graphs blow up
doubly exponentially.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .policy import DEFAULT_POLICY, NumericPolicy


class AlgebraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# univariate


def _trim(c: np.ndarray, rel_tol: float) -> np.ndarray:
    c = np.asarray(c, dtype=complex).ravel()
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    k = c.size - 1
    while k > 0 and abs(c[k]) <= rel_tol * scale:
        k -= 1
    return c[: k + 1].copy()


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial; coeffs[k] multiplies z**k."""

    coeffs: np.ndarray

    def __init__(self, coeffs, rel_tol: float = DEFAULT_POLICY.trim_rel_tol):
        object.__setattr__(self, "coeffs", _trim(np.asarray(coeffs, dtype=complex), rel_tol))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    def derivative(self) -> "UniPoly":
        if self.degree == 0:
            return UniPoly([0.0])
        k = np.arange(1, self.degree + 1)
        return UniPoly(self.coeffs[1:] * k)

    def normalized(self) -> "UniPoly":
        s = np.max(np.abs(self.coeffs))
        # idempotent: a renormalization of an already-normalized polynomial
        # must not move bits (serialization round trips depend on it)
        return self if s == 0.0 or abs(s - 1.0) < 1e-12 else UniPoly(self.coeffs / s)

    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))


def _horner_many(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z, dtype=complex)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    monic = coeffs / coeffs[-1]
    C = np.zeros((n, n), dtype=complex)
    if n > 1:
        C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -monic[:n]
    return np.linalg.eigvals(C)


def _chordal(a: complex, b: complex) -> float:
    # chordal distance on the sphere avoids huge-root pathologies
    return 2.0 * abs(a - b) / np.sqrt((1.0 + abs(a) ** 2) * (1.0 + abs(b) ** 2))


def _cluster(roots: np.ndarray, tol: float, policy: NumericPolicy):
    """Greedy single-linkage clustering with multiplicity-adaptive radius."""
    clusters: list[list[complex]] = []
    centers: list[complex] = []
    for r in roots:
        placed = False
        for k, cl in enumerate(clusters):
            radius = max(policy.cluster_tol, tol ** (1.0 / (len(cl) + 1)))
            if _chordal(r, centers[k]) <= radius:
                cl.append(r)
                # recenter in the chart where the cluster lives
                if abs(centers[k]) <= 1.0:
                    centers[k] = sum(cl) / len(cl)
                else:
                    centers[k] = len(cl) / sum(1.0 / v for v in cl)
                placed = True
                break
        if not placed:
            clusters.append([r])
            centers.append(r)
    return [(centers[k], len(clusters[k])) for k in range(len(clusters))]


def _chart_residuals(c: np.ndarray, r: np.ndarray) -> np.ndarray:
    """|p(r)|, evaluated on the reversed polynomial at 1/r for |r| > 1."""
    r = np.asarray(r, dtype=complex)
    res = np.empty(len(r), dtype=float)
    near = np.abs(r) <= 1.0
    if np.any(near):
        res[near] = np.abs(_horner_many(c, r[near]))
    if np.any(~near):
        res[~near] = np.abs(_horner_many(c[::-1], 1.0 / r[~near]))
    return res


def roots(p: UniPoly, tol: float = 1e-10, policy: NumericPolicy = DEFAULT_POLICY):
    """All roots of p with multiplicities, as a list of (root, multiplicity).

    Companion-matrix eigenvalues with Newton corrections (large roots are
    polished in inverted coordinates), then clustering: roots closer than
    tol**(1/m) in chart distance are merged into one root of multiplicity m.
    Residuals are checked against tol * scale(p), with roots outside the
    unit disk measured on the reversed polynomial.
    """
    if p.is_zero:
        raise AlgebraError("identically zero fiber")
    if p.degree == 0:
        return []
    c = p.normalized().coeffs
    vals, _ = batched_projective_roots(c[None, :], policy=policy)
    raw = vals[0]
    # a trimmed polynomial has a sound leading coefficient, so roots are finite
    raw = raw[np.isfinite(raw.real) & np.isfinite(raw.imag)]
    out = _cluster(raw, tol, policy)
    rep = np.array([r for r, _ in out])
    res = _chart_residuals(c, rep)
    if np.any(res > tol * 10):
        raise AlgebraError(
            f"root refinement did not converge; worst residual {float(res.max()):.3e}")
    return out


@dataclass(frozen=True)
class SquarefreeResult:
    poly: UniPoly
    ill_conditioned: bool = False


def _sylvester_matrix(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    m, n = len(p) - 1, len(q) - 1
    S = np.zeros((m + n, m + n), dtype=complex)
    for k in range(n):
        S[k, k: k + m + 1] = p[::-1]
    for k in range(m):
        S[n + k, k: k + n + 1] = q[::-1]
    return S


def squarefree_part(p: UniPoly, policy: NumericPolicy = DEFAULT_POLICY) -> SquarefreeResult:
    """Remove repeated factors: same root set, all multiplicities one.

    The degree of gcd(p, p') is read off the Sylvester-matrix singular value
    gap; the square-free polynomial itself is rebuilt from clustered roots.
    A weak gap sets the ill_conditioned flag.
    """
    if p.is_zero:
        raise AlgebraError("zero polynomial")
    if p.degree <= 1:
        return SquarefreeResult(p.normalized())
    c = p.normalized()
    dp = c.derivative()
    S = _sylvester_matrix(c.coeffs, dp.coeffs)
    sv = np.linalg.svd(S, compute_uv=False)
    sv = sv / sv[0]
    # rank deficiency of the Sylvester matrix equals deg gcd(p, p')
    small = sv < 1e-10
    g = int(np.sum(small))
    flag = False
    if g > 0:
        gap = sv[len(sv) - g - 1] / max(sv[len(sv) - g], 1e-300)
        if gap < policy.gcd_rank_gap:
            flag = True
    cl = roots(c, tol=1e-8, policy=policy)
    if len(cl) != c.degree - g:
        flag = True
    coeffs = np.array([1.0 + 0j])
    for r, _ in cl:
        coeffs = np.convolve(coeffs, np.array([-r, 1.0 + 0j]))
    return SquarefreeResult(UniPoly(coeffs).normalized(), flag)


# ---------------------------------------------------------------------------
# bivariate


def _trim2(c: np.ndarray, rel_tol: float) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.ndim != 2:
        raise AlgebraError("coefficient matrix must be 2-d")
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros((1, 1), dtype=complex)
    row_mass = np.max(np.abs(c), axis=1)
    col_mass = np.max(np.abs(c), axis=0)
    a = len(row_mass) - 1
    while a > 0 and row_mass[a] <= rel_tol * scale:
        a -= 1
    b = len(col_mass) - 1
    while b > 0 and col_mass[b] <= rel_tol * scale:
        b -= 1
    return c[: a + 1, : b + 1].copy()


@dataclass(frozen=True)
class BiPoly:
    """Bivariate polynomial with coefficient matrix c[i, j] for x**i * y**j."""

    coeffs: np.ndarray

    def __init__(self, coeffs, rel_tol: float = DEFAULT_POLICY.trim_rel_tol):
        object.__setattr__(self, "coeffs", _trim2(np.asarray(coeffs, dtype=complex), rel_tol))

    @property
    def deg_x(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def deg_y(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.deg_x, self.deg_y)

    @property
    def is_zero(self) -> bool:
        return self.coeffs.shape == (1, 1) and self.coeffs[0, 0] == 0

    def __call__(self, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        # Horner in x of Horner-in-y rows
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for row in self.coeffs[::-1]:
            out = out * x + _horner_many(row, y)
        return out

    def normalized(self) -> "BiPoly":
        s = np.max(np.abs(self.coeffs))
        return self if s == 0.0 or abs(s - 1.0) < 1e-12 else BiPoly(self.coeffs / s)

    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def partial_x(self) -> "BiPoly":
        if self.deg_x == 0:
            return BiPoly([[0.0]])
        k = np.arange(1, self.deg_x + 1)
        return BiPoly(self.coeffs[1:, :] * k[:, None])

    def partial_y(self) -> "BiPoly":
        if self.deg_y == 0:
            return BiPoly([[0.0]])
        k = np.arange(1, self.deg_y + 1)
        return BiPoly(self.coeffs[:, 1:] * k[None, :])

    def transpose(self) -> "BiPoly":
        return BiPoly(self.coeffs.T)

    def reverse_x(self) -> "BiPoly":
        """x**a * P(1/x, y): the x = infinity chart."""
        return BiPoly(self.coeffs[::-1, :])

    def reverse_y(self) -> "BiPoly":
        return BiPoly(self.coeffs[:, ::-1])

    def y_fiber_coeffs(self, x) -> np.ndarray:
        """Coefficient rows of P(x_k, .) for a batch of x values: (N, deg_y+1)."""
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        V = np.vander(x, self.deg_x + 1, increasing=True)
        return V @ self.coeffs

    def x_fiber_coeffs(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=complex))
        V = np.vander(y, self.deg_y + 1, increasing=True)
        return V @ self.coeffs.T

    def mobius_both(self, M: np.ndarray) -> "BiPoly":
        """Conjugate coordinates: cleared form of P(M(x), M(y)).

        M acts as z -> (az+b)/(cz+d); the result is the defining polynomial of
        the graph pulled back by M in both factors, renormalized.
        """
        a, b = self.deg_x, self.deg_y
        U = _mobius_basis(M, a)
        V = _mobius_basis(M, b)
        return BiPoly(U.T @ self.coeffs @ V).normalized()


def _mobius_basis(M: np.ndarray, deg: int) -> np.ndarray:
    """Rows: coefficients of (alpha t + beta)^i (gamma t + delta)^(deg-i)."""
    al, be, ga, de = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    out = np.zeros((deg + 1, deg + 1), dtype=complex)
    for i in range(deg + 1):
        p = np.array([1.0 + 0j])
        for _ in range(i):
            p = np.convolve(p, np.array([be, al]))
        for _ in range(deg - i):
            p = np.convolve(p, np.array([de, ga]))
        out[i, : len(p)] = p
    return out


def _fourier_nodes(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def _coeffs_from_values(vals: np.ndarray) -> np.ndarray:
    """Recover coefficients from values on the unit-circle Fourier grid."""
    # vals_k = sum_p c_p exp(2 pi i p k / K)  ==>  c = fft(vals) / K
    return np.fft.fft(vals, axis=0) / vals.shape[0]


def _sylvester_batch(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Sylvester matrices for batches of coefficient rows (formal degrees fixed).

    P: (N, m+1), Q: (N, n+1)  ->  (N, m+n, m+n)
    """
    N, m1 = P.shape
    _, n1 = Q.shape
    m, n = m1 - 1, n1 - 1
    S = np.zeros((N, m + n, m + n), dtype=complex)
    for k in range(n):
        S[:, k, k: k + m + 1] = P[:, ::-1]
    for k in range(m):
        S[:, n + k, k: k + n + 1] = Q[:, ::-1]
    return S


def resultant(p: BiPoly, q: BiPoly, eliminate: str = "y",
              policy: NumericPolicy = DEFAULT_POLICY) -> UniPoly:
    """Resultant of two polynomials in the same variables, eliminating one.

    Returns the resultant as a univariate polynomial in the remaining
    variable.  Degenerate leading coefficients (identically zero in the
    eliminated variable) raise.  For the chained elimination used by graph
    composition (p in (x,y), q in (y,z)) see `resultant_chain`.
    """
    if eliminate == "x":
        p, q = p.transpose(), q.transpose()
    elif eliminate != "y":
        raise AlgebraError("eliminate must be 'x' or 'y'")
    if p.deg_y < 1 or q.deg_y < 1:
        raise AlgebraError("positive degree required in the eliminated variable")
    scale = np.max(np.abs(p.coeffs[:, -1])), np.max(np.abs(q.coeffs[:, -1]))
    if min(scale) <= policy.lead_tol * max(p.scale(), q.scale()):
        raise AlgebraError("degenerate leading coefficient in eliminated variable")
    m, n = p.deg_y, q.deg_y
    K = p.deg_x * n + q.deg_x * m + 1
    xs = _fourier_nodes(K)
    Pv = p.y_fiber_coeffs(xs)          # (K, m+1)
    Qv = q.y_fiber_coeffs(xs)          # (K, n+1)
    dets = np.linalg.det(_sylvester_batch(Pv, Qv))
    return UniPoly(_coeffs_from_values(dets))


def resultant_chain(pg: BiPoly, pf: BiPoly,
                    policy: NumericPolicy = DEFAULT_POLICY) -> BiPoly:
    """Eliminate the middle variable from pg(x, y) and pf(y, z).

    The result is the Sylvester determinant Res_y, a polynomial in (x, z)
    with deg_x <= deg_x(pg) * deg_y(pf) and deg_z <= deg_z(pf) * deg_y(pg),
    recovered exactly (up to floating error) by interpolation on a Fourier
    product grid.
    """
    m = pg.deg_y                       # degree of pg in y
    n = pf.deg_x                       # degree of pf in y (its first axis)
    if m < 1 or n < 1:
        raise AlgebraError("positive degree required in the eliminated variable")
    K1 = pg.deg_x * n + 1
    K2 = pf.deg_y * m + 1
    xs = _fourier_nodes(K1)
    zs = _fourier_nodes(K2)
    A = pg.y_fiber_coeffs(xs)                       # (K1, m+1) coeffs in y
    B = pf.x_fiber_coeffs(zs)                       # (K2, n+1) coeffs in y
    AA = np.repeat(A, K2, axis=0)
    BB = np.tile(B, (K1, 1))
    dets = np.linalg.det(_sylvester_batch(AA, BB)).reshape(K1, K2)
    c = np.fft.fft2(dets) / (K1 * K2)
    return BiPoly(c)


def discriminant(p: BiPoly, var: str = "x",
                 policy: NumericPolicy = DEFAULT_POLICY) -> UniPoly:
    """Res_var(p, dp/dvar) divided by the leading coefficient.

    Vanishes where the fiber of the projection forgetting `var` collides.
    An identically zero result signals a repeated component of the curve.
    """
    q = p if var == "x" else p.transpose()
    if var not in ("x", "y"):
        raise AlgebraError("var must be 'x' or 'y'")
    if q.deg_x < 2:
        raise AlgebraError("no ramification possible: degree < 2 in " + var)
    r = resultant(q.transpose(), q.partial_x().transpose(), eliminate="y", policy=policy)
    # division by the leading coefficient is a scale detail; coefficients are
    # renormalized anyway, so only report near-zero results
    return r.normalized() if not r.is_zero else r


def resultant_is_zero(r: UniPoly | BiPoly, policy: NumericPolicy = DEFAULT_POLICY) -> bool:
    c = np.abs(np.asarray(r.coeffs))
    return bool(np.max(c) <= policy.resultant_zero_tol)


# ---------------------------------------------------------------------------
# batched projective root solving (the fiber kernel)


def batched_projective_roots(rows: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY):
    """Roots on P^1 of a batch of degree-D coefficient rows.

    rows: (N, D+1).  Returns (N, D) complex roots where degree drops are
    padded with complex infinity, plus a boolean mask of degenerate
    (identically zero) rows.  Finite roots get one vectorized Newton pass;
    roots of modulus > 1 are polished in inverted coordinates.
    """
    rows = np.asarray(rows, dtype=complex)
    N, D1 = rows.shape
    D = D1 - 1
    out = np.full((N, D), np.inf + 0j, dtype=complex)
    scale = np.max(np.abs(rows), axis=1)
    degenerate = scale <= 1e-300
    if D == 0:
        return out[:, :0], degenerate
    work = rows / np.where(degenerate, 1.0, scale)[:, None]

    lead_ok = np.abs(work[:, -1]) >= policy.lead_tol
    tail_ok = np.abs(work[:, 0]) >= policy.lead_tol
    cls_fwd = lead_ok & ~degenerate
    cls_rev = ~lead_ok & tail_ok & ~degenerate
    cls_slow = ~lead_ok & ~tail_ok & ~degenerate

    if np.any(cls_fwd):
        out[cls_fwd] = _roots_fixed_degree(work[cls_fwd])
    if np.any(cls_rev):
        r = _roots_fixed_degree(work[cls_rev][:, ::-1])
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(np.abs(r) <= 1.0 / policy.inf_cutoff, np.inf + 0j, 1.0 / r)
        out[cls_rev] = inv
    if np.any(cls_slow):
        idx = np.nonzero(cls_slow)[0]
        for i in idx:
            out[i] = _projective_roots_single(work[i], policy)

    finite = np.isfinite(out.real) & np.isfinite(out.imag)
    out = _polish_batch(work, out, finite, policy)
    out[np.abs(out) > policy.inf_cutoff] = np.inf + 0j
    return out, degenerate


def _roots_fixed_degree(rows: np.ndarray) -> np.ndarray:
    """Roots of rows with sound leading coefficient (formal degree = D)."""
    N, D1 = rows.shape
    D = D1 - 1
    monic = rows / rows[:, -1:]
    if D == 1:
        return -monic[:, :1]
    if D == 2:
        b, c = monic[:, 1], monic[:, 0]
        disc = np.sqrt(b * b - 4.0 * c)
        # sign choice avoiding cancellation
        qq = -0.5 * (b + np.where(b.real * disc.real + b.imag * disc.imag >= 0, disc, -disc))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(np.abs(qq) > 0, qq, 0.0)
            r2 = np.where(np.abs(qq) > 0, c / np.where(np.abs(qq) > 0, qq, 1.0), 0.0)
        return np.stack([r1, r2], axis=1)
    C = np.zeros((N, D, D), dtype=complex)
    C[:, 1:, :-1] = np.eye(D - 1)
    C[:, :, -1] = -monic[:, :D]
    return np.linalg.eigvals(C)


def _projective_roots_single(row: np.ndarray, policy: NumericPolicy) -> np.ndarray:
    D = len(row) - 1
    c = _trim(row, policy.lead_tol)
    n_inf = D - (len(c) - 1)
    vals = np.full(D, np.inf + 0j, dtype=complex)
    if len(c) > 1:
        vals[: len(c) - 1] = np.roots(c[::-1])
    return vals


def _polish_batch(rows, roots_, finite, policy):
    """One Newton pass on finite roots, in the better-conditioned chart."""
    N, D1 = rows.shape
    drows = rows[:, 1:] * np.arange(1, D1)
    r = np.where(finite, roots_, 0.0)
    near = finite & (np.abs(r) <= 1.0)
    far = finite & ~near
    for _ in range(policy.newton_passes):
        p = _horner_rows(rows, r)
        dp = _horner_rows(drows, r)
        ok = near & (np.abs(dp) > 1e-30)
        step = np.where(ok, p / np.where(ok, dp, 1.0), 0.0)
        step = np.where(np.abs(step) > 0.1, 0.1 * step / np.where(step != 0, np.abs(step), 1.0), step)
        r = r - step
    if np.any(far):
        rev = rows[:, ::-1]
        drev = rev[:, 1:] * np.arange(1, D1)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(far, 1.0 / np.where(far, r, 1.0), 0.0)
        for _ in range(policy.newton_passes):
            p = _horner_rows(rev, u)
            dp = _horner_rows(drev, u)
            ok = far & (np.abs(dp) > 1e-30)
            step = np.where(ok, p / np.where(ok, dp, 1.0), 0.0)
            step = np.where(np.abs(step) > 0.1, 0.1 * step / np.where(step != 0, np.abs(step), 1.0), step)
            u = u - step
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(far & (np.abs(u) > 1.0 / policy.inf_cutoff), 1.0 / u, r)
            r = np.where(far & (np.abs(u) <= 1.0 / policy.inf_cutoff), np.inf + 0j, r)
    return np.where(finite, r, roots_)


def _horner_rows(rows: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z, dtype=complex)
    for k in range(rows.shape[1] - 1, -1, -1):
        c = rows[:, k]
        out = out * z + (c[:, None] if z.ndim == 2 else c)
    return out


def univariate_content_roots(c: np.ndarray, axis: int,
                             policy: NumericPolicy = DEFAULT_POLICY):
    """Common roots of all coefficient slices along `axis` (with multiplicity).

    A common root r of every column polynomial of c means (x - r) divides the
    whole bivariate polynomial; these are exactly the fiber factors that graph
    composition must strip.
    """
    c = np.asarray(c, dtype=complex)
    if axis == 1:
        c = c.T
    scale = np.max(np.abs(c))
    cols = [c[:, j] for j in range(c.shape[1]) if np.max(np.abs(c[:, j])) > policy.trim_rel_tol * scale]
    if not cols:
        return []
    ref = max(cols, key=lambda col: np.max(np.abs(col)))
    p = UniPoly(ref)
    if p.degree == 0:
        return []
    found = []
    for r, m in roots(p, tol=1e-8, policy=policy):
        vals = [np.abs(_horner_many(col / np.max(np.abs(col)), np.array([r])))[0] for col in cols]
        if max(vals) <= policy.fiber_tol:
            mult = m
            for col in cols:
                mult = min(mult, _root_multiplicity(col, r, policy))
            if mult >= 1:
                found.append((r, mult))
    return found


def _root_multiplicity(col: np.ndarray, r: complex, policy: NumericPolicy) -> int:
    c = col / np.max(np.abs(col))
    mult = 0
    while len(c) > 1:
        if np.abs(_horner_many(c, np.array([r])))[0] > policy.fiber_tol:
            break
        mult += 1
        c = _synthetic_division(c, r)
    return mult


def _synthetic_division(c: np.ndarray, r: complex) -> np.ndarray:
    """Quotient of c by (z - r), dropping the remainder."""
    n = len(c) - 1
    q = np.zeros(n, dtype=complex)
    acc = c[n]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = c[k] + r * acc
    return q


def deflate_axis(c: np.ndarray, r: complex, mult: int, axis: int) -> np.ndarray:
    """Divide a coefficient matrix by (var - r)**mult along one axis."""
    c = np.asarray(c, dtype=complex)
    if axis == 1:
        return deflate_axis(c.T, r, mult, 0).T
    out = c
    for _ in range(mult):
        out = np.stack([_synthetic_division(out[:, j], r) for j in range(out.shape[1])], axis=1)
    return out

"""Numeric tolerances used across the package.

Every routine that makes a floating-point judgement call (root clustering,
degree trimming, periodicity certification, ...) takes an explicit policy
argument instead of reading global state, so that experiment manifests can
record the exact tolerances a run used.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    # root finding
    root_residual_tol: float = 1e-8     # |p(r)| <= tol * scale(p) after polish
    cluster_tol: float = 1e-7           # chart-distance merge radius for multiple roots
    newton_passes: int = 2
    inf_cutoff: float = 1e8             # |root| beyond which a root counts as infinity

    # coefficient handling
    trim_rel_tol: float = 1e-9          # relative threshold for dropping leading rows/cols
    lead_tol: float = 1e-10             # leading-coefficient degeneracy threshold
    fiber_tol: float = 1e-8             # common-root threshold for fiber/content detection
    resultant_zero_tol: float = 1e-9    # |Res| below this (relative) means common factor
    gcd_rank_gap: float = 1e4           # singular-value gap ratio certifying approximate GCD

    # curve geometry
    sing_tol: float = 1e-5              # |grad P| below this at a witness = singular point

    # orbits and periodicity
    tol_periodic: float = 1e-3          # near-return radius for critical orbits
    certify_tol: float = 1e-9           # algebraic residual for a certified return
    orbit_point_cap: int = 20000
    orbit_dedup_tol: float = 1e-9

    # grids and operators
    crit_mask_factor: float = 10.0      # r_crit floor: crit_mask_factor / resolution
    crit_mask_sqrt: float = 1.5         # and crit_mask_sqrt / sqrt(resolution): below
    #                                     that radius the grid cannot separate branches
    #                                     colliding at the critical value
    mask_fraction_limit: float = 0.20
    interp_tol: float = 1e-9

    # classification
    tol_neutral: float = 0.05           # |multiplier| within 1 +/- tol_neutral is neutral

    # caps
    iterate_degree_cap: int = 4096

    def replace(self, **kw) -> "NumericPolicy":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_POLICY = NumericPolicy()

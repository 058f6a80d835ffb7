"""Numerical dynamics of holomorphic correspondences on the Riemann sphere.

Graph algebra for correspondences of equal bidegree, canonical-measure
estimation by orbit transport, spectral contraction diagnostics, mixing and
equidistribution-rate measurement, and periodic points with multipliers.
"""

__version__ = "0.1.0"

from .policy import DEFAULT_POLICY, NumericPolicy
from .algebra import AlgebraError, BiPoly, UniPoly, discriminant, resultant, resultant_chain, roots, squarefree_part
from .correspondence import (
    CompositionDegenerateError,
    Correspondence,
    CorrespondenceError,
    adjoint,
    compose,
    critical_orbit_report,
    critical_values,
    delta_bound,
    from_bipoly,
    iterate,
)
from .pointcloud import PointCloudMeasure
from .transport import (
    GridField,
    backward_cloud,
    forward_cloud,
    oneform_pullback,
    operator_norm_estimate,
    pullback_dirac,
    pullback_form,
    random_oneform,
    transfer_apply,
)
from .sphere import INF, SphereGrid
from .measures import (
    RateReport,
    TestDictionary,
    dual_lip_distance,
    invariance_residual,
    mixing_correlation,
    pair,
    rate_fit,
    render_density,
)
from .periodic import PeriodicPoint, graph_pairing, periodic_points
from . import gallery

__all__ = [name for name in dir() if not name.startswith("_")]

"""hyperlab: numerical experiments with Finsler geodesics on the Poincare disc."""

from .disc_geometry import (
    BoundaryDirection,
    DiscPoint,
    HyperbolicGeodesic,
    MobiusMap,
    TangentVector,
    classify,
    endpoint_estimate,
    geodesic_between,
    hyperbolic_distance,
)

__version__ = "0.1.0"

"""Hyperbolic cone-manifold structures with prescribed PSL(2, R) holonomy.

Submodules:

- plane       upper half-plane primitives and polygons
- isometry    PSL(2, R) elements, classification, constructive maps
- cover       universal cover, Euler class, twist
- characters  punctured-torus character dynamics
- domains     pentagon / pants fundamental domains, good representations
- gluing      genus-2 gluings and extremal assembly
- documents   JSON representation documents
- render      SVG output
- experiment  seeded ergodicity experiment
"""

from .plane import (
    INFINITY,
    Geodesic,
    GeodesicPolygon,
    collar_width,
    common_perpendicular,
    dist,
    fermi_point,
    geodesic_through,
    interior_angle,
    polygon_validate,
)
from .isometry import Isometry, classify, commutator, compose_reflections, conjugate, segment_carrier
from .cover import Lift, SurfaceRep, euler_class, region, simplest_lift, theta, twist
from .characters import Character, char_to_rep, gamma_apply, goldman_reduce, kappa, sample_level_set

__all__ = [
    "INFINITY",
    "Geodesic",
    "GeodesicPolygon",
    "collar_width",
    "common_perpendicular",
    "dist",
    "fermi_point",
    "geodesic_through",
    "interior_angle",
    "polygon_validate",
    "Isometry",
    "classify",
    "commutator",
    "compose_reflections",
    "conjugate",
    "segment_carrier",
    "Lift",
    "SurfaceRep",
    "euler_class",
    "region",
    "simplest_lift",
    "theta",
    "twist",
    "Character",
    "char_to_rep",
    "gamma_apply",
    "goldman_reduce",
    "kappa",
    "sample_level_set",
]

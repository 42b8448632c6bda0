"""Concrete plane-curve representations of finite convex geometries.

The package has four computational layers plus a CLI:

* :mod:`almostcircles.combinatorics` — closure systems on {1..n}, generation
  from linear-ordering tuples, and the reverse chain extraction.
* :mod:`almostcircles.curves` — the concave polynomial arch family, sector
  affine maps, almost-circle assembly, and affine canonical-form recovery.
* :mod:`almostcircles.representation` — parameter allocation, rank matrices,
  curve-family construction, and certificate build/verify.
* :mod:`almostcircles.hull_engine` — support-function convex-hull decisions
  used as the independent geometric check.
* :mod:`almostcircles.render` — SVG paths and matplotlib figures.
"""

from .combinatorics import (
    ClosureSystem,
    GeometryError,
    GeometryReport,
    LinearOrderTuple,
    NotAConvexGeometryError,
    closure_from_orderings,
    closure_of,
    convex_dimension,
    maximal_chains,
    orderings_from_geometry,
    restrict_system,
    verify_convex_geometry,
)
from .curves import (
    AccuracyReport,
    AffineMap,
    AlmostCircle,
    ArcRecoveryError,
    ArcSamples,
    CurveError,
    PolynomialArc,
    accuracy,
    arcs_affinely_equivalent,
    auxiliary_max_check,
    build_almost_circle,
    canonical_arc_parameters,
    eval_good_function,
    good_function_derivatives,
    sector_affine_map,
    standard_triangle,
)
from .hull_engine import (
    FamilyHull,
    HullDecision,
    SingletonCurve,
    arc_support,
    closure_system_of_family,
    curve_support,
    hull_membership,
    hull_operator,
    verify_local_anti_exchange,
)
from .representation import (
    ParameterSet,
    RepresentationFamily,
    affine_disjoint_families,
    allocate_parameters,
    backward_rank,
    build_family,
    combinatorial_membership,
    multiplicity_for_accuracy,
    pad_orders,
    parameter_matrix,
    represent_geometry,
    verify_certificate,
    verify_isomorphism,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "AffineMap",
    "AlmostCircle",
    "ArcRecoveryError",
    "ArcSamples",
    "ClosureSystem",
    "CurveError",
    "FamilyHull",
    "GeometryError",
    "GeometryReport",
    "HullDecision",
    "LinearOrderTuple",
    "NotAConvexGeometryError",
    "ParameterSet",
    "PolynomialArc",
    "RepresentationFamily",
    "SingletonCurve",
    "accuracy",
    "affine_disjoint_families",
    "allocate_parameters",
    "arc_support",
    "arcs_affinely_equivalent",
    "auxiliary_max_check",
    "backward_rank",
    "build_almost_circle",
    "build_family",
    "canonical_arc_parameters",
    "closure_from_orderings",
    "closure_of",
    "closure_system_of_family",
    "combinatorial_membership",
    "convex_dimension",
    "curve_support",
    "eval_good_function",
    "good_function_derivatives",
    "hull_membership",
    "hull_operator",
    "maximal_chains",
    "multiplicity_for_accuracy",
    "orderings_from_geometry",
    "pad_orders",
    "parameter_matrix",
    "represent_geometry",
    "restrict_system",
    "sector_affine_map",
    "standard_triangle",
    "verify_certificate",
    "verify_convex_geometry",
    "verify_isomorphism",
    "verify_local_anti_exchange",
    "__version__",
]

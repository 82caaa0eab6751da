"""Weighted Monge-Ampere potentials from lifted Minkowski problems.

Pipeline: an atomic measure on R^n is lifted to an even measure on the
sphere, a symmetric convex body with that weighted surface-area measure is
found by variational gradient ascent, and the body's lower envelope is
conjugated into a piecewise-linear convex potential whose weighted
Monge-Ampere measure reproduces the input atom masses.
"""

from .envelope import (
    ConvexRegion,
    PWLConvexFunction,
    legendre_transform,
    potential_from_body,
    subgradient,
)
from .errors import (
    CollapsedBody,
    ConcentratedOnHyperplane,
    DegenerateHull,
    EmptySubgradientFacet,
    MinkliftError,
    NoLowerFacets,
    NotConverged,
    OutsideDomain,
    SchemaError,
    UnboundedBody,
    UnknownNormal,
    ZeroMass,
)
from .estimator import InstanceSolution, MongeAmpereSolver, solve_instance
from .geometry import (
    Direction,
    Facet,
    Polytope,
    build_polytope,
    facet_for_normal,
    lower_envelope,
    polar_dual,
)
from .lifting import DirectionalMeasure, lift_point, reweight_for_lift, symmetrized_lift
from .measures import (
    AdmissibilityReport,
    QuadratureSpec,
    Weight,
    admissibility_scan,
    normalization_constant,
    weighted_facet_area,
    weighted_facet_area_mc,
    weighted_surface_measure,
    weighted_volume,
)
from .minkowski import (
    MinkowskiTarget,
    ResidualReport,
    SolveReport,
    energy_and_gradient,
    residual_report,
    solve_minkowski,
)
from .verification import (
    AtomMass,
    RadialReport,
    RadialRoots,
    VerificationReport,
    gaussian_sphere_radii,
    monge_ampere_atom_mass,
    radial_solution_residual,
    sphere_gaussian_density,
    verify_instance,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "AtomMass",
    "CollapsedBody",
    "ConcentratedOnHyperplane",
    "ConvexRegion",
    "DegenerateHull",
    "Direction",
    "DirectionalMeasure",
    "EmptySubgradientFacet",
    "Facet",
    "InstanceSolution",
    "MinkliftError",
    "MinkowskiTarget",
    "MongeAmpereSolver",
    "NoLowerFacets",
    "NotConverged",
    "OutsideDomain",
    "Polytope",
    "PWLConvexFunction",
    "QuadratureSpec",
    "RadialReport",
    "RadialRoots",
    "ResidualReport",
    "SchemaError",
    "SolveReport",
    "UnboundedBody",
    "UnknownNormal",
    "VerificationReport",
    "Weight",
    "ZeroMass",
    "admissibility_scan",
    "build_polytope",
    "energy_and_gradient",
    "facet_for_normal",
    "gaussian_sphere_radii",
    "legendre_transform",
    "lift_point",
    "lower_envelope",
    "monge_ampere_atom_mass",
    "normalization_constant",
    "polar_dual",
    "potential_from_body",
    "radial_solution_residual",
    "residual_report",
    "reweight_for_lift",
    "solve_instance",
    "solve_minkowski",
    "sphere_gaussian_density",
    "subgradient",
    "symmetrized_lift",
    "verify_instance",
    "weighted_facet_area",
    "weighted_facet_area_mc",
    "weighted_surface_measure",
    "weighted_volume",
]

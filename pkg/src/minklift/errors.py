"""Exception types shared across the package."""


class MinkliftError(Exception):
    """Base class for package-specific errors."""


class UnboundedBody(MinkliftError):
    """The given halfspaces do not cut out a bounded body."""


class DegenerateHull(MinkliftError):
    """Points or planes are affinely dependent beyond tolerance."""


class UnknownNormal(MinkliftError):
    """Queried direction is not one of the construction normals."""


class NoLowerFacets(MinkliftError):
    """No facet faces downward, so the body has no lower envelope."""


class ZeroMass(MinkliftError):
    """Weighted volume fell below the quadrature floor."""


class CollapsedBody(MinkliftError):
    """Line search drove a support value to the positivity floor."""


class NotConverged(MinkliftError):
    """Solver finished without meeting its gradient tolerance."""


class ConcentratedOnHyperplane(MinkliftError):
    """The atoms sit on an affine hyperplane and cannot be lifted."""


class OutsideDomain(MinkliftError):
    """Point lies outside the effective domain of the function."""


class EmptySubgradientFacet(MinkliftError):
    """The contact facet for an atom is degenerate (unconverged solve)."""


class SchemaError(MinkliftError):
    """Input JSON violates the documented schema."""

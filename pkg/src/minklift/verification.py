"""Numerical checks that a solved instance satisfies the weak equation.

For a piecewise-linear potential the weighted Monge-Ampere measure is
purely atomic at the input atoms, so verification is complete once every
atom's mass is recovered.  Each atom is evaluated along two independent
routes: a direct quadrature of the weight over the projected contact
facet, and the change-of-variables value c * F * cos, where F is the
weighted facet area and cos the last component of the lifted direction.
The second value is reported (it carries no projection-quadrature error);
the first is the cross-check.

The module also contains the closed-form radial gaussian example: radii
whose gaussian surface-area density matches a prescribed level, and the
pointwise residual of the induced smooth potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .envelope import PWLConvexFunction
from .errors import EmptySubgradientFacet
from .geometry import Polytope, facet_for_normal
from .lifting import DirectionalMeasure, lift_point
from .measures import QuadratureSpec, Weight, simplex_rule, weighted_facet_area

#: default relative tolerance for atom-mass verification
VERIFY_TOL = 1e-5


@dataclass(frozen=True)
class AtomMass:
    """Both evaluation routes for the mass at one atom."""

    value: float                # c * F * cos, the reported number
    direct: float               # c * integral over the projected facet
    weighted_facet_area: float  # F
    cosine: float               # 1/sqrt(1 + |x|^2)
    relative_gap: float         # |direct - value| / max(|value|, floor)


def monge_ampere_atom_mass(
    u: PWLConvexFunction,
    K: Polytope,
    weight: Weight,
    c: float,
    x,
    quad: QuadratureSpec | None = None,
) -> AtomMass:
    """Weighted Monge-Ampere mass of the potential at a single atom.

    The subgradient image of the atom is the projection of the contact
    facet of its lifted direction, and the weight is evaluated on the graph
    of the lower envelope, which is affine there.  Raises
    EmptySubgradientFacet when the facet is degenerate (the solve put no
    mass on this direction).
    """
    quad = quad or QuadratureSpec()
    x = np.asarray(x, dtype=float).reshape(-1)
    xi = lift_point(x)
    facet = facet_for_normal(K, xi)
    if facet.area <= 1e-14:
        raise EmptySubgradientFacet(
            f"atom at {x.tolist()} has a degenerate contact facet"
        )
    F = weighted_facet_area(facet, weight, quad)
    cosine = 1.0 / math.sqrt(1.0 + float(x @ x))
    value = c * F * cosine

    # independent route: quadrature of phi(p, w(p)) over the projected facet
    nhat, s = facet.normal.coords[:-1], facet.normal.coords[-1]
    proj = facet.vertices[:, :-1]
    if K.dimension == 2:
        simplices = [proj]
    else:
        simplices = [
            np.array([proj[0], proj[i], proj[i + 1]])
            for i in range(1, proj.shape[0] - 1)
        ]
    total = 0.0
    for S in simplices:
        nodes, wts = simplex_rule(S, quad.order)
        heights = (nodes @ nhat - facet.support) / (-s)
        lifted = np.column_stack([nodes, heights])
        total += float(np.sum(wts * weight.density(lifted)))
    direct = c * total
    gap = abs(direct - value) / max(abs(value), 1e-300)
    return AtomMass(
        value=value,
        direct=direct,
        weighted_facet_area=F,
        cosine=cosine,
        relative_gap=gap,
    )


@dataclass(frozen=True)
class AtomCheck:
    x: list
    target_mass: float
    computed_mass: float
    relative_error: float
    weighted_facet_area: float
    cosine: float
    route_gap: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "target_mass": self.target_mass,
            "computed_mass": self.computed_mass,
            "relative_error": self.relative_error,
            "weighted_facet_area": self.weighted_facet_area,
            "cosine": self.cosine,
            "route_gap": self.route_gap,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class VerificationReport:
    """Per-atom comparison of computed Monge-Ampere masses with targets."""

    atoms: tuple[AtomCheck, ...]
    c: float
    tolerance: float
    total_target: float
    total_computed: float

    @property
    def max_relative_error(self) -> float:
        return max(a.relative_error for a in self.atoms)

    @property
    def max_route_gap(self) -> float:
        return max(a.route_gap for a in self.atoms)

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "atoms": [a.to_dict() for a in self.atoms],
            "c": self.c,
            "tolerance": self.tolerance,
            "total_target": self.total_target,
            "total_computed": self.total_computed,
            "max_relative_error": self.max_relative_error,
            "max_route_gap": self.max_route_gap,
            "passed": self.passed,
        }

    def csv_rows(self) -> list[list]:
        header = [
            "x", "target_mass", "computed_mass", "relative_error",
            "weighted_facet_area", "cosine", "route_gap",
        ]
        rows = [header]
        for a in self.atoms:
            rows.append([
                ";".join(f"{v!r}" for v in a.x),
                a.target_mass, a.computed_mass, a.relative_error,
                a.weighted_facet_area, a.cosine, a.route_gap,
            ])
        return rows


def verify_instance(
    measure: DirectionalMeasure,
    K: Polytope,
    u: PWLConvexFunction,
    weight: Weight,
    c: float,
    quad: QuadratureSpec | None = None,
    tolerance: float = VERIFY_TOL,
) -> VerificationReport:
    """Check computed atom masses against targets; reports, never raises.

    Unconverged solves show up as relative errors above the tolerance (or
    degenerate facets, recorded with computed mass 0).
    """
    quad = quad or QuadratureSpec()
    checks = []
    total = 0.0
    for x, m in zip(measure.points, measure.masses):
        try:
            am = monge_ampere_atom_mass(u, K, weight, c, x, quad)
            computed, fw, cosine, gap = am.value, am.weighted_facet_area, am.cosine, am.relative_gap
            degenerate = False
        except EmptySubgradientFacet:
            computed, fw, gap = 0.0, 0.0, 0.0
            cosine = 1.0 / math.sqrt(1.0 + float(x @ x))
            degenerate = True
        total += computed
        checks.append(
            AtomCheck(
                x=x.tolist(),
                target_mass=float(m),
                computed_mass=computed,
                relative_error=abs(computed - m) / m,
                weighted_facet_area=fw,
                cosine=cosine,
                route_gap=gap,
                degenerate=degenerate,
            )
        )
    return VerificationReport(
        atoms=tuple(checks),
        c=float(c),
        tolerance=tolerance,
        total_target=measure.total_mass,
        total_computed=total,
    )


# --------------------------------------------------------------------------
# radial gaussian example
# --------------------------------------------------------------------------

def sphere_gaussian_density(r, n: int):
    """Gaussian surface-area density of the radius-r sphere in R^(n+1):
    exp(-r^2/2) r^n / (2 pi)^((n+1)/2)."""
    r = np.asarray(r, dtype=float)
    return np.exp(-0.5 * r * r) * r**n / (2.0 * math.pi) ** ((n + 1) / 2.0)


@dataclass(frozen=True)
class RadialRoots:
    """Radii solving level = sphere_gaussian_density(r, n)."""

    status: str                  # "two" | "double" | "none"
    radii: tuple[float, ...]
    level: float
    dimension: int
    peak_radius: float
    peak_level: float

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "radii": list(self.radii),
            "level": self.level,
            "dimension": self.dimension,
            "peak_radius": self.peak_radius,
            "peak_level": self.peak_level,
        }


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) == (fm < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def gaussian_sphere_radii(a: float, n: int) -> RadialRoots:
    """All radii with sphere_gaussian_density(r, n) = a.

    The density peaks at r = sqrt(n); levels below the peak give two radii
    bracketing it, the peak itself (within 1e-12) gives a double root, and
    larger levels give none.
    """
    if n not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    if not (np.isfinite(a) and a > 0):
        raise ValueError("level must be finite and > 0")
    peak_r = math.sqrt(n)
    peak = float(sphere_gaussian_density(peak_r, n))
    if abs(a - peak) <= 1e-12:
        return RadialRoots("double", (peak_r, peak_r), a, n, peak_r, peak)
    if a > peak:
        return RadialRoots("none", (), a, n, peak_r, peak)

    def g(r: float) -> float:
        return float(sphere_gaussian_density(r, n)) - a

    hi = 2.0 * peak_r
    while g(hi) > 0:
        hi *= 2.0
    r1 = _bisect(g, 1e-300, peak_r)
    r2 = _bisect(g, peak_r, hi)
    return RadialRoots("two", (r1, r2), a, n, peak_r, peak)


def _radial_potential(r: float):
    """u(x) = r sqrt(1 + |x|^2) and its closed-form calculus."""

    def u(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return r * np.sqrt(1.0 + np.sum(x * x, axis=1))

    def grad(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return r * x / np.sqrt(1.0 + np.sum(x * x, axis=1))[:, None]

    def hessian_det(x, n):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return r**n * (1.0 + np.sum(x * x, axis=1)) ** (-(n + 2) / 2.0)

    def conjugate(y):
        y = np.atleast_2d(np.asarray(y, dtype=float))
        return -np.sqrt(r * r - np.sum(y * y, axis=1))

    return u, grad, hessian_det, conjugate


def _conjugate_by_scan(r: float, y_norm: float) -> float:
    """sup_t {y t - r sqrt(1 + t^2)} by coarse scan plus ternary refinement."""
    t_star = y_norm / math.sqrt(max(r * r - y_norm * y_norm, 1e-30))
    lo, hi = t_star - 1.0, t_star + 1.0

    def value(t):
        return y_norm * t - r * math.sqrt(1.0 + t * t)

    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if value(m1) < value(m2):
            lo = m1
        else:
            hi = m2
    return value(0.5 * (lo + hi))


RHS_NOTE = (
    "The right-hand side consistent with u(x) = r*sqrt(1+|x|^2) is "
    "f(x) = (1+|x|^2)^(-(n+2)/2): the weight factor is constant because "
    "|(Du, u*(Du))| = r, and det D^2 u = r^n (1+|x|^2)^(-(n+2)/2).  The "
    "alternative form f(x) = a/sqrt(1+|x|^2) is NOT satisfied by this u "
    "for n >= 1 (the exponents would only match in dimension n = -1); its "
    "residual is reported in alt_rhs_max_gap instead of being hidden."
)


@dataclass(frozen=True)
class RadialReport:
    """Pointwise residual of the smooth radial solution on a grid.

    The residual compares c_u * phi((Du, u*(Du))) * det D^2 u against the
    self-consistent right-hand side f(x) = (1+|x|^2)^(-(n+2)/2).  All
    analytic ingredients are cross-checked against central finite
    differences (step 1e-4) and a sup-scan of the conjugate.
    """

    r: float
    n: int
    a: float
    c_u: float
    grid: np.ndarray
    residuals: np.ndarray
    max_relative_residual: float
    phi_constancy_gap: float
    fd_gradient_max_error: float
    fd_hessian_max_error: float
    conjugate_scan_max_error: float
    alt_rhs_max_gap: float
    note: str = field(default=RHS_NOTE)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "a": self.a,
            "c_u": self.c_u,
            "max_relative_residual": self.max_relative_residual,
            "phi_constancy_gap": self.phi_constancy_gap,
            "fd_gradient_max_error": self.fd_gradient_max_error,
            "fd_hessian_max_error": self.fd_hessian_max_error,
            "conjugate_scan_max_error": self.conjugate_scan_max_error,
            "alt_rhs_max_gap": self.alt_rhs_max_gap,
            "rhs_used": "(1+|x|^2)^(-(n+2)/2)",
            "alt_rhs": "a/sqrt(1+|x|^2)",
            "note": self.note,
        }


def radial_solution_residual(r: float, n: int, grid=None) -> RadialReport:
    """Residual of the radial potential with c_u = 1/a on |x| <= 3.

    `grid` holds the radii |x| (default 200 points up to 3); for n = 2 the
    sample points run along a fixed non-axis ray so the finite-difference
    Hessian sees generic coordinates.
    """
    if n not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    a = float(sphere_gaussian_density(r, n))
    c_u = 1.0 / a
    if grid is None:
        grid = np.linspace(0.0, 3.0, 200)
    grid = np.asarray(grid, dtype=float)
    ray = np.array([1.0]) if n == 1 else np.array([math.cos(0.3), math.sin(0.3)])
    points = grid[:, None] * ray[None, :]

    u, grad, hessian_det, conjugate = _radial_potential(r)
    weight = Weight.gaussian(beta=1.0 / (2 * (n + 1)))

    g = grad(points)
    ustar_vals = conjugate(g)
    lifted = np.column_stack([g, ustar_vals])
    phi_vals = weight.density(lifted)
    phi_expected = math.exp(-0.5 * r * r) / (2.0 * math.pi) ** ((n + 1) / 2.0)
    phi_gap = float(np.max(np.abs(phi_vals - phi_expected)))

    det_vals = hessian_det(points, n)
    lhs = c_u * phi_vals * det_vals
    one_plus = 1.0 + np.sum(points * points, axis=1)
    f_self = one_plus ** (-(n + 2) / 2.0)
    residuals = np.abs(lhs - f_self) / f_self
    f_alt = a / np.sqrt(one_plus)
    alt_gap = float(np.max(np.abs(lhs - f_alt) / f_alt))

    # finite-difference cross-checks of the analytic calculus
    step = 1e-4
    fd_grad_err = 0.0
    fd_hess_err = 0.0
    eye = np.eye(n)
    for p in points[:: max(1, len(points) // 25)]:
        for i in range(n):
            fd = (u(p + step * eye[i])[0] - u(p - step * eye[i])[0]) / (2 * step)
            exact = grad(p)[0][i]
            fd_grad_err = max(fd_grad_err, abs(fd - exact) / max(1.0, abs(exact)))
        H = np.empty((n, n))
        for i in range(n):
            H[i, i] = (
                u(p + step * eye[i])[0] - 2 * u(p)[0] + u(p - step * eye[i])[0]
            ) / step**2
            for j in range(i + 1, n):
                H[i, j] = H[j, i] = (
                    u(p + step * (eye[i] + eye[j]))[0]
                    - u(p + step * (eye[i] - eye[j]))[0]
                    - u(p - step * (eye[i] - eye[j]))[0]
                    + u(p - step * (eye[i] + eye[j]))[0]
                ) / (4 * step**2)
        exact_det = hessian_det(p, n)[0]
        fd_hess_err = max(fd_hess_err, abs(np.linalg.det(H) - exact_det) / abs(exact_det))

    # conjugate against the sup-scan, away from the |y| = r blow-up
    scan_err = 0.0
    for y in np.linspace(0.0, r - 1e-3, 25):
        analytic = -math.sqrt(r * r - y * y)
        scan_err = max(scan_err, abs(analytic - _conjugate_by_scan(r, y)))

    return RadialReport(
        r=float(r),
        n=n,
        a=a,
        c_u=c_u,
        grid=grid,
        residuals=residuals,
        max_relative_residual=float(np.max(residuals)),
        phi_constancy_gap=phi_gap,
        fd_gradient_max_error=fd_grad_err,
        fd_hessian_max_error=fd_hess_err,
        conjugate_scan_max_error=scan_err,
        alt_rhs_max_gap=alt_gap,
    )

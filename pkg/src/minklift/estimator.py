"""End-to-end pipeline and its sklearn-style estimator facade.

`solve_instance` wires the modules together: lift the atomic measure to an
even spherical target, solve the weighted Minkowski problem for a
symmetric body, read the potential off the body's lower vertices, and
verify every atom mass.  `MongeAmpereSolver` wraps the same pipeline in a
fit/predict API so it composes with scikit-learn tooling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.validation import check_array, check_is_fitted

from .envelope import PWLConvexFunction, potential_from_body
from .geometry import Polytope, build_polytope
from .lifting import DirectionalMeasure, symmetrized_lift
from .measures import QuadratureSpec, Weight
from .minkowski import MinkowskiTarget, SolveReport, solve_minkowski
from .validation import check_masses, check_points
from .verification import VERIFY_TOL, VerificationReport, verify_instance


@dataclass(frozen=True)
class InstanceSolution:
    """Everything produced by one end-to-end solve."""

    measure: DirectionalMeasure
    weight: Weight
    quad: QuadratureSpec
    target: MinkowskiTarget
    body: Polytope
    potential: PWLConvexFunction
    c: float
    report: SolveReport
    verification: VerificationReport


def solve_instance(
    measure: DirectionalMeasure,
    weight: Weight,
    quad: QuadratureSpec | None = None,
    *,
    tol: float = 1e-8,
    max_iters: int = 10_000,
    verify_tolerance: float = VERIFY_TOL,
    check_admissibility: bool = True,
) -> InstanceSolution:
    """Solve one instance end to end and verify it atom by atom."""
    quad = quad or QuadratureSpec()
    target = symmetrized_lift(measure)
    report = solve_minkowski(
        target, weight, quad, tol=tol, max_iters=max_iters,
        check_admissibility=check_admissibility,
    )
    body = build_polytope(target.normals, report.h)
    potential = potential_from_body(body)
    verification = verify_instance(
        measure, body, potential, weight, report.c, quad, tolerance=verify_tolerance
    )
    return InstanceSolution(
        measure=measure,
        weight=weight,
        quad=quad,
        target=target,
        body=body,
        potential=potential,
        c=report.c,
        report=report,
        verification=verification,
    )


class MongeAmpereSolver(BaseEstimator):
    """Fit a convex potential whose weighted Monge-Ampere measure matches
    prescribed atom masses.

    Parameters
    ----------
    weight : {"gaussian", "constant", "radial_profile"}
        Weight density kind.
    beta : float or None
        Scan exponent; None picks 0.4 (constant) or 1/(2(n+1)) (gaussian).
    weight_value : float
        Level of the constant weight.
    weight_profile : array-like or None
        (k, 2) breakpoints of a radial_profile weight.
    tol, max_iters : solver stopping controls.
    quad_order, mc_samples, seed : quadrature controls.

    Attributes (after fit)
    ----------------------
    body_ : the solved symmetric convex body.
    potential_ : the piecewise-linear convex potential u.
    c_ : the measure-dependent constant of the solved equation.
    report_ : SolveReport of the Minkowski stage.
    verification_ : per-atom VerificationReport.
    """

    def __init__(
        self,
        weight: str = "gaussian",
        beta: float | None = None,
        weight_value: float = 1.0,
        weight_profile=None,
        tol: float = 1e-8,
        max_iters: int = 10_000,
        quad_order: int = 8,
        mc_samples: int = 200_000,
        seed: int = 0,
    ):
        self.weight = weight
        self.beta = beta
        self.weight_value = weight_value
        self.weight_profile = weight_profile
        self.tol = tol
        self.max_iters = max_iters
        self.quad_order = quad_order
        self.mc_samples = mc_samples
        self.seed = seed

    def _resolve_weight(self, ambient_dim: int) -> Weight:
        beta = self.beta
        if beta is None:
            beta = Weight.default_beta(self.weight, ambient_dim)
        if self.weight == "constant":
            return Weight.constant(self.weight_value, beta=beta)
        if self.weight == "gaussian":
            return Weight.gaussian(beta=beta)
        if self.weight == "radial_profile":
            return Weight.radial_profile(self.weight_profile, beta=beta)
        raise ValueError(f"unknown weight kind {self.weight!r}")

    def fit(self, X, y):
        """Solve for the potential.

        X : (m, n) atom positions, n in {1, 2}; y : (m,) positive masses.
        """
        X = check_array(X, ensure_2d=True, dtype=float)
        X = check_points(X, "X")
        y = check_masses(y, X.shape[0], "y")
        measure = DirectionalMeasure.from_atoms(X, y)
        weight = self._resolve_weight(measure.dimension + 1)
        quad = QuadratureSpec(
            order=self.quad_order, mc_samples=self.mc_samples, seed=self.seed
        )
        solution = solve_instance(
            measure, weight, quad, tol=self.tol, max_iters=self.max_iters
        )
        if not solution.report.converged:
            warnings.warn(
                "Minkowski solve did not converge within max_iters; "
                "attributes hold the last iterate",
                ConvergenceWarning,
            )
        self.n_features_in_ = X.shape[1]
        self.measure_ = measure
        self.weight_ = weight
        self.target_ = solution.target
        self.body_ = solution.body
        self.potential_ = solution.potential
        self.c_ = solution.c
        self.report_ = solution.report
        self.verification_ = solution.verification
        return self

    def predict(self, X) -> np.ndarray:
        """Evaluate the fitted potential at the given points."""
        check_is_fitted(self, "potential_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return self.potential_(X)

    def subgradients(self, x) -> np.ndarray:
        """Generators of the subdifferential of the potential at one point."""
        check_is_fitted(self, "potential_")
        from .envelope import subgradient

        return subgradient(self.potential_, np.asarray(x, dtype=float))

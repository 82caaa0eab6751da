"""Variational solver for the discrete weighted Minkowski problem.

Given even spherical directions xi_i with even masses a_i, find support
values h > 0 with mu(K(h))^(beta/d - 1) * F_i(h) = a_i, where F_i is the
weighted area of the facet with normal xi_i.  The solver ascends

    E(h) = (d / beta) mu(K(h))^(beta/d) - sum_i a_i h_i,

whose gradient is exactly the stationarity residual (the first variation
of the weighted volume in h_i is the weighted facet area; tests validate
this against finite differences).  Evenness is enforced structurally by
optimizing one variable per antipodal pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CollapsedBody, DegenerateHull, UnboundedBody
from .geometry import build_polytope
from .measures import (
    MASS_FLOOR,
    QuadratureSpec,
    Weight,
    admissibility_scan,
    weighted_surface_measure,
    weighted_volume,
)
from .validation import check_unit_rows, spans_space

#: support values may never fall below this during a solve
SUPPORT_FLOOR = 1e-9
ARMIJO_C1 = 1e-4
MAX_BACKTRACKS = 60
#: energy comparisons are only meaningful above this relative fp noise
ENERGY_NOISE = 1e-13
#: gradient level (relative to max mass) where the Newton post-pass engages
REFINE_GATE = 1e-4


@dataclass(frozen=True)
class MinkowskiTarget:
    """Even atomic measure on the sphere: unit normals plus positive masses.

    Normals must close under negation with equal masses on each antipodal
    pair and must span the ambient space (no great-subsphere concentration).
    """

    normals: np.ndarray
    masses: np.ndarray
    pairs: tuple[tuple[int, int], ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        normals = check_unit_rows(self.normals)
        masses = np.asarray(self.masses, dtype=float).ravel()
        if masses.shape[0] != normals.shape[0]:
            raise ValueError("need one mass per normal")
        if np.any(masses <= 0) or not np.all(np.isfinite(masses)):
            raise ValueError("masses must be finite and > 0")
        if not spans_space(normals):
            raise ValueError("normals are concentrated in a great subsphere")
        pairs = self.pairs or _antipodal_pairs(normals)
        for i, j in pairs:
            if abs(masses[i] - masses[j]) > 1e-12 * max(masses[i], masses[j]):
                raise ValueError(f"masses on antipodal pair ({i}, {j}) differ")
        normals = np.ascontiguousarray(normals)
        normals.flags.writeable = False
        masses = np.ascontiguousarray(masses)
        masses.flags.writeable = False
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "pairs", tuple(pairs))

    @property
    def dimension(self) -> int:
        return self.normals.shape[1]

    @property
    def n_normals(self) -> int:
        return self.normals.shape[0]

    @property
    def representatives(self) -> np.ndarray:
        return np.array([i for i, _ in self.pairs], dtype=int)

    def expand(self, theta: np.ndarray) -> np.ndarray:
        """Full even support vector from one value per antipodal pair."""
        h = np.empty(self.n_normals)
        for value, (i, j) in zip(theta, self.pairs):
            h[i] = value
            h[j] = value
        return h

    def reduce(self, per_normal: np.ndarray) -> np.ndarray:
        """Fold a per-normal vector onto pairs (sums the two members)."""
        return np.array([per_normal[i] + per_normal[j] for i, j in self.pairs])


def _antipodal_pairs(normals: np.ndarray) -> list[tuple[int, int]]:
    used = np.zeros(normals.shape[0], dtype=bool)
    pairs: list[tuple[int, int]] = []
    for i in range(normals.shape[0]):
        if used[i]:
            continue
        dists = np.linalg.norm(normals + normals[i][None, :], axis=1)
        dists[used] = np.inf
        dists[i] = np.inf
        j = int(np.argmin(dists))
        if dists[j] > 1e-9:
            raise ValueError(f"normal {i} has no antipode (measure is not even)")
        used[i] = used[j] = True
        pairs.append((i, j))
    return pairs


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one Minkowski solve."""

    h: np.ndarray                 # per-normal supports (even)
    c: float                      # mu(K)^(beta/d - 1) at the solution
    residuals: np.ndarray         # c * F_i - a_i per normal
    iterations: int
    energy_trace: np.ndarray
    converged: bool
    max_relative_residual: float

    def to_dict(self) -> dict:
        return {
            "h": self.h.tolist(),
            "c": self.c,
            "residuals": self.residuals.tolist(),
            "iterations": self.iterations,
            "energy_trace": self.energy_trace.tolist(),
            "converged": self.converged,
            "max_relative_residual": self.max_relative_residual,
        }


def energy_and_gradient(
    h, target: MinkowskiTarget, weight: Weight, quad: QuadratureSpec | None = None
) -> tuple[float, np.ndarray]:
    """E(h) and its per-normal gradient mu^(beta/d - 1) F_i - a_i.

    The gradient vanishes exactly at support vectors whose body solves the
    weighted Minkowski problem for the target masses.
    """
    quad = quad or QuadratureSpec()
    h = np.asarray(h, dtype=float)
    K = build_polytope(target.normals, h)
    F = weighted_surface_measure(K, weight, quad)
    mu = weighted_volume(K, weight, quad)
    if mu <= MASS_FLOOR:
        raise CollapsedBody(f"weighted volume {mu:g} vanished during evaluation")
    d, beta = target.dimension, weight.beta
    energy = (d / beta) * mu ** (beta / d) - float(target.masses @ h)
    grad = mu ** (beta / d - 1.0) * F - target.masses
    return energy, grad


@dataclass(frozen=True)
class ResidualReport:
    residuals: np.ndarray
    max_relative: float

    def to_dict(self) -> dict:
        return {"residuals": self.residuals.tolist(), "max_relative": self.max_relative}


def residual_report(
    h, target: MinkowskiTarget, weight: Weight, quad: QuadratureSpec | None = None
) -> ResidualReport:
    """Stationarity residuals c * F_i - a_i at the given supports."""
    _, grad = energy_and_gradient(h, target, weight, quad)
    return ResidualReport(
        residuals=grad,
        max_relative=float(np.max(np.abs(grad)) / np.max(target.masses)),
    )


def _fd_hessian(theta, target, weight, quad) -> np.ndarray:
    """Reduced-coordinate Hessian of E from central differences of the
    gradient (the quasi-Newton refinement once facets have stabilized)."""
    P = theta.shape[0]
    H = np.empty((P, P))
    for i in range(P):
        eps = 1e-6 * max(float(theta[i]), 1e-2)
        plus = theta.copy()
        plus[i] += eps
        minus = theta.copy()
        minus[i] -= eps
        _, gp = energy_and_gradient(target.expand(plus), target, weight, quad)
        _, gm = energy_and_gradient(target.expand(minus), target, weight, quad)
        H[:, i] = (target.reduce(gp) - target.reduce(gm)) / (2.0 * eps)
    return 0.5 * (H + H.T)


def solve_minkowski(
    target: MinkowskiTarget,
    weight: Weight,
    quad: QuadratureSpec | None = None,
    *,
    tol: float = 1e-8,
    max_iters: int = 10_000,
    h0=None,
    check_admissibility: bool = True,
) -> SolveReport:
    """Gradient ascent over the even cone {h > 0, h_xi = h_(-xi)}.

    One variable per antipodal pair, Armijo backtracking (c1 = 1e-4,
    halving) with a Barzilai-Borwein trial step, initialized at h = 1.
    Once the gradient has fallen far enough that the facet structure is
    stable, a finite-difference quasi-Newton post-pass polishes the root
    (plain ascent cannot resolve energy improvements below fp noise).
    Terminates when the sup-norm of the per-normal gradient falls below
    tol * max(a) or after max_iters (then converged=False is reported, not
    raised).  Raises CollapsedBody if the iterates drive any support below
    the positivity floor, which signals an invalid target or quadrature
    noise rather than a missing solution.
    """
    quad = quad or QuadratureSpec()
    weight.validate_beta(target.dimension)
    if check_admissibility:
        scan = admissibility_scan(weight, target.dimension)
        if not scan.passed:
            raise ValueError(
                "weight/beta fail the admissibility scan on [1e-3, 1e3]; "
                "run the scan for the trend table"
            )

    reps = target.representatives
    theta = np.ones(len(target.pairs)) if h0 is None else np.asarray(h0, float)[reps].copy()
    if np.any(theta <= 0):
        raise ValueError("initial supports must be positive")

    def evaluate(t):
        return energy_and_gradient(target.expand(t), target, weight, quad)

    energy, grad_full = evaluate(theta)
    grad = target.reduce(grad_full)
    max_a = float(np.max(target.masses))
    gate = tol * max_a
    trace = [energy]
    step = 1.0
    prev_theta = prev_grad = None
    iterations = 0
    converged = False
    newton_cooldown = 0

    while iterations < max_iters:
        sup = float(np.max(np.abs(grad_full)))
        if sup <= gate:
            converged = True
            break
        iterations += 1

        if sup <= REFINE_GATE * max_a and newton_cooldown == 0:
            # quasi-Newton step; fall back to first-order on any failure
            try:
                H = _fd_hessian(theta, target, weight, quad)
                delta = -np.linalg.solve(H, grad)
            except (np.linalg.LinAlgError, DegenerateHull, UnboundedBody, CollapsedBody):
                delta = None
            moved = False
            if delta is not None and float(delta @ grad) > 0:
                scale = 1.0
                for _ in range(30):
                    trial = theta + scale * delta
                    if np.any(trial < SUPPORT_FLOOR / 10.0):
                        scale /= 2.0
                        continue
                    try:
                        trial_energy, trial_grad_full = evaluate(trial)
                    except (DegenerateHull, UnboundedBody, CollapsedBody):
                        scale /= 2.0
                        continue
                    if float(np.max(np.abs(trial_grad_full))) < sup:
                        moved = True
                        break
                    scale /= 2.0
            if moved:
                prev_theta, prev_grad = theta, grad
                theta, energy, grad_full = trial, trial_energy, trial_grad_full
                grad = target.reduce(grad_full)
                trace.append(energy)
                continue
            newton_cooldown = 25

        # Barzilai-Borwein trial step from the previous displacement
        gamma = step * 2.0
        if prev_theta is not None:
            dtheta = theta - prev_theta
            dgrad = grad - prev_grad
            denom = -float(dtheta @ dgrad)
            if denom > 1e-18:
                gamma = float(dtheta @ dtheta) / denom
        gamma = float(np.clip(gamma, 1e-12, 1e6))

        gg = float(grad @ grad)
        noise = ENERGY_NOISE * max(1.0, abs(energy))
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            trial = theta + gamma * grad
            if np.any(trial < SUPPORT_FLOOR / 10.0):
                gamma /= 2.0
                continue
            try:
                trial_energy, trial_grad_full = evaluate(trial)
            except (DegenerateHull, UnboundedBody, CollapsedBody):
                gamma /= 2.0
                continue
            if trial_energy >= energy + ARMIJO_C1 * gamma * gg - noise:
                accepted = True
                break
            gamma /= 2.0
        if not accepted:
            break  # no ascent step available; report unconverged below

        if newton_cooldown:
            newton_cooldown -= 1
        prev_theta, prev_grad = theta, grad
        theta, energy, grad_full = trial, trial_energy, trial_grad_full
        grad = target.reduce(grad_full)
        step = gamma
        trace.append(energy)
        if float(np.min(theta)) < SUPPORT_FLOOR:
            raise CollapsedBody(
                "line search drove a support below the positivity floor; "
                "a facet never activates for this target"
            )

    if not converged:
        converged = float(np.max(np.abs(grad_full))) <= gate

    h = target.expand(theta)
    mu = weighted_volume(build_polytope(target.normals, h), weight, quad)
    c = mu ** (weight.beta / target.dimension - 1.0)
    return SolveReport(
        h=h,
        c=float(c),
        residuals=grad_full,
        iterations=iterations,
        energy_trace=np.asarray(trace),
        converged=converged,
        max_relative_residual=float(np.max(np.abs(grad_full)) / np.max(target.masses)),
    )

"""Weight densities and the weighted geometric quantities built from them.

All built-in weights are radial, so evaluation factors through |z| and is
exactly even by construction.  Facet integrals use Gauss-Legendre rules on
a simplex decomposition (segments, triangles, or origin-fan tetrahedra);
reductions run in fixed index order, so results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import ZeroMass

#: weighted volumes below this floor are treated as zero mass
MASS_FLOOR = 1e-14
#: simplices with edges longer than this get bisected before quadrature
MAX_QUAD_EDGE = 2.0

WEIGHT_KINDS = ("constant", "gaussian", "radial_profile")


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre order per simplex axis, Monte Carlo cross-check size."""

    order: int = 8
    mc_samples: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("quadrature order must be >= 2")
        if self.mc_samples < 1000:
            raise ValueError("mc_samples must be >= 1000")


@dataclass(frozen=True)
class Weight:
    """Even density on the ambient space, with its scan exponent beta.

    kind "constant": phi = value everywhere.
    kind "gaussian": the standard normal density exp(-|z|^2/2)/(2 pi)^(d/2),
    where d is the ambient dimension of the evaluation point.
    kind "radial_profile": piecewise-linear g(|z|) >= 0, held constant past
    the last breakpoint.
    """

    kind: str
    beta: float
    value: float = 1.0
    profile: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError("beta must be finite and > 0")
        if self.kind == "constant" and not (np.isfinite(self.value) and self.value > 0):
            raise ValueError("constant weight level must be > 0")
        if self.kind == "radial_profile":
            prof = np.asarray(self.profile, dtype=float)
            if prof.ndim != 2 or prof.shape[1] != 2 or prof.shape[0] < 2:
                raise ValueError("profile must be a (k, 2) array of (radius, level) rows")
            if np.any(np.diff(prof[:, 0]) <= 0) or prof[0, 0] < 0:
                raise ValueError("profile radii must start >= 0 and increase")
            if np.any(prof[:, 1] < 0) or not np.all(np.isfinite(prof)):
                raise ValueError("profile levels must be finite and >= 0")
            prof = np.ascontiguousarray(prof)
            prof.flags.writeable = False
            object.__setattr__(self, "profile", prof)

    @classmethod
    def constant(cls, value: float = 1.0, beta: float = 0.4) -> "Weight":
        return cls(kind="constant", beta=beta, value=value)

    @classmethod
    def gaussian(cls, beta: float) -> "Weight":
        return cls(kind="gaussian", beta=beta)

    @classmethod
    def radial_profile(cls, profile, beta: float = 0.4) -> "Weight":
        return cls(kind="radial_profile", beta=beta, profile=np.asarray(profile, float))

    @staticmethod
    def default_beta(kind: str, ambient_dim: int) -> float:
        """Midpoints of the admissible ranges: 0.4, or 1/(2d) for gaussian."""
        if kind == "gaussian":
            return 1.0 / (2 * ambient_dim)
        return 0.4

    def validate_beta(self, ambient_dim: int) -> None:
        if self.kind == "gaussian" and not (0.0 < self.beta < 1.0 / ambient_dim):
            raise ValueError(
                f"gaussian weight requires beta in (0, 1/{ambient_dim}), got {self.beta}"
            )

    def radial_density(self, r, ambient_dim: int):
        """phi as a function of the radius |z| in R^ambient_dim."""
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.full_like(r, self.value)
        if self.kind == "gaussian":
            return np.exp(-0.5 * r * r) / (2.0 * math.pi) ** (ambient_dim / 2.0)
        return np.interp(r, self.profile[:, 0], self.profile[:, 1])

    def density(self, points) -> np.ndarray:
        """phi at points (k, d); even exactly since it depends on |z| only."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.sqrt(np.sum(pts * pts, axis=1))
        return self.radial_density(r, pts.shape[1])

    def __call__(self, point) -> float:
        return float(self.density(np.atleast_2d(point))[0])

    def ball_mass(self, radius: float, ambient_dim: int) -> float:
        """Weighted measure of the centered ball of the given radius."""
        if radius <= 0:
            return 0.0
        omega = 2.0 * math.pi ** (ambient_dim / 2.0) / math.gamma(ambient_dim / 2.0)
        if self.kind == "constant":
            return self.value * omega * radius**ambient_dim / ambient_dim
        pieces = None
        if self.kind == "radial_profile":
            pieces = [r for r in self.profile[:, 0] if 0.0 < r < radius] or None
        val, _ = integrate.quad(
            lambda s: float(self.radial_density(s, ambient_dim)) * s ** (ambient_dim - 1),
            0.0,
            radius,
            points=pieces,
            limit=200,
        )
        return omega * val

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "beta": self.beta}
        if self.kind == "constant":
            out["value"] = self.value
        if self.kind == "radial_profile":
            out["profile"] = self.profile.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Weight":
        return cls(
            kind=data["kind"],
            beta=float(data["beta"]),
            value=float(data.get("value", 1.0)),
            profile=None if data.get("profile") is None else np.asarray(data["profile"], float),
        )


@lru_cache(maxsize=32)
def _gl_unit(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def simplex_measure(V: np.ndarray) -> float:
    """k-dimensional measure of a k-simplex embedded in R^d."""
    M = V[1:] - V[0]
    k = M.shape[0]
    gram = M @ M.T
    det = float(np.linalg.det(gram))
    return math.sqrt(max(det, 0.0)) / math.factorial(k)


def simplex_rule(V, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and weights for a k-simplex (k <= 3) in R^d.

    Uses the collapsed tensor-product map
    x(t) = V0 + t1 (V1 - V0) + t1 t2 (V2 - V1) + t1 t2 t3 (V3 - V2)
    whose Jacobian contributes k! vol(V) * prod_i t_i^(k-i).
    """
    V = np.asarray(V, dtype=float)
    k = V.shape[0] - 1
    x1, w1 = _gl_unit(order)
    grids = np.meshgrid(*([x1] * k), indexing="ij")
    ts = [g.ravel() for g in grids]
    wgrids = np.meshgrid(*([w1] * k), indexing="ij")
    wt = np.ones(ts[0].shape[0])
    for g in wgrids:
        wt = wt * g.ravel()
    nodes = np.broadcast_to(V[0], (ts[0].shape[0], V.shape[1])).copy()
    prefix = np.ones(ts[0].shape[0])
    factor = np.ones(ts[0].shape[0])
    for i in range(1, k + 1):
        prefix = prefix * ts[i - 1]
        nodes += prefix[:, None] * (V[i] - V[i - 1])
        factor = factor * ts[i - 1] ** (k - i)
    weights = wt * factor * math.factorial(k) * simplex_measure(V)
    return nodes, weights


def _bisect_long_edges(V: np.ndarray, max_edge: float = MAX_QUAD_EDGE) -> list[np.ndarray]:
    """Longest-edge bisection until all edges are short enough."""
    out: list[np.ndarray] = []
    stack = [V]
    while stack:
        S = stack.pop()
        k = S.shape[0]
        best, best_len = None, max_edge
        for i in range(k):
            for j in range(i + 1, k):
                length = np.linalg.norm(S[i] - S[j])
                if length > best_len:
                    best, best_len = (i, j), length
        if best is None:
            out.append(S)
            continue
        i, j = best
        mid = (S[i] + S[j]) / 2.0
        for swap in (i, j):
            child = S.copy()
            child[swap] = mid
            stack.append(child)
    return out


def _facet_simplices(facet) -> list[np.ndarray]:
    """Fan decomposition of a contact facet into (d-1)-simplices."""
    V = facet.vertices
    if facet.dimension == 2:
        return [V] if V.shape[0] == 2 else []
    if V.shape[0] < 3:
        return []
    return [np.array([V[0], V[i], V[i + 1]]) for i in range(1, V.shape[0] - 1)]


def _integrate_simplices(simplices, weight: Weight, order: int) -> float:
    nodes_list, weights_list = [], []
    for S in simplices:
        for piece in _bisect_long_edges(S):
            n, w = simplex_rule(piece, order)
            nodes_list.append(n)
            weights_list.append(w)
    if not nodes_list:
        return 0.0
    nodes = np.concatenate(nodes_list, axis=0)
    w = np.concatenate(weights_list, axis=0)
    return float(np.sum(w * weight.density(nodes)))


def weighted_facet_area(facet, weight: Weight, quad: QuadratureSpec | None = None) -> float:
    """Integral of the weight density over one contact facet.

    The Lebesgue facet area is recovered exactly for a constant unit weight
    (same code path); degenerate facets contribute 0.
    """
    quad = quad or QuadratureSpec()
    if facet.area <= 0.0:
        return 0.0
    return _integrate_simplices(_facet_simplices(facet), weight, quad.order)


def weighted_facet_area_mc(
    facet, weight: Weight, quad: QuadratureSpec | None = None
) -> tuple[float, float]:
    """Monte Carlo cross-check of weighted_facet_area: (estimate, std error)."""
    quad = quad or QuadratureSpec()
    simplices = _facet_simplices(facet)
    areas = np.array([simplex_measure(S) for S in simplices])
    total = float(areas.sum())
    if total <= 0.0:
        return 0.0, 0.0
    rng = np.random.default_rng(quad.seed)
    n = quad.mc_samples
    counts = rng.multinomial(n, areas / total)
    values = []
    for S, cnt in zip(simplices, counts):
        if cnt == 0:
            continue
        k = S.shape[0] - 1
        bary = rng.dirichlet(np.ones(k + 1), size=cnt)
        pts = bary @ S
        values.append(weight.density(pts))
    vals = np.concatenate(values)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(n))
    return total * mean, total * stderr


def weighted_surface_measure(K, weight: Weight, quad: QuadratureSpec | None = None) -> np.ndarray:
    """Weighted area of every contact facet, in construction-normal order."""
    quad = quad or QuadratureSpec()
    return np.array([weighted_facet_area(f, weight, quad) for f in K.facets])


def weighted_volume(K, weight: Weight, quad: QuadratureSpec | None = None) -> float:
    """Weighted measure of the body, by an origin fan over facet simplices."""
    quad = quad or QuadratureSpec()
    origin = np.zeros(K.dimension)
    simplices = []
    for f in K.facets:
        for S in _facet_simplices(f):
            simplices.append(np.vstack([origin[None, :], S]))
    return _integrate_simplices(simplices, weight, quad.order)


def normalization_constant(K, weight: Weight, quad: QuadratureSpec | None = None) -> float:
    """mu(K)^(beta/d - 1), the measure-dependent scale of the stationarity
    condition.  Raises ZeroMass below the quadrature floor, since the
    negative exponent would blow up."""
    mu = weighted_volume(K, weight, quad)
    if mu <= MASS_FLOOR:
        raise ZeroMass(f"weighted volume {mu:g} is below the floor {MASS_FLOOR:g}")
    return mu ** (weight.beta / K.dimension - 1.0)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Scan of mu(rB)^(beta/d)/r over a log grid, with trend flags.

    This is a numerical diagnostic for the required limits (ratio -> 0 as
    r -> infinity and -> infinity as r -> 0+), not a proof.
    """

    radii: np.ndarray
    ball_masses: np.ndarray
    ratios: np.ndarray
    ambient_dim: int
    beta: float
    passes_small_r: bool
    passes_large_r: bool

    @property
    def passed(self) -> bool:
        return self.passes_small_r and self.passes_large_r

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.radii.tolist(), self.ball_masses.tolist(), self.ratios.tolist()))

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "beta": self.beta,
            "rows": [
                {"r": r, "ball_mass": m, "ratio": q} for r, m, q in self.rows()
            ],
            "passes_small_r": self.passes_small_r,
            "passes_large_r": self.passes_large_r,
            "passed": self.passed,
        }


def admissibility_scan(
    weight: Weight, ambient_dim: int, r_grid=None
) -> AdmissibilityReport:
    """Evaluate mu(rB)^(beta/d)/r on a log-spaced grid spanning >= 4 decades.

    Ball masses come from radial 1-d quadrature (all built-in weights are
    radial), so no polytope approximation error enters the diagnostic.
    A trend passes when the ratio falls strictly and by at least 5% across
    the outermost (resp. innermost) decade of the grid.
    """
    if r_grid is None:
        r_grid = np.logspace(-3.0, 3.0, 49)
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or r.shape[0] < 8 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise ValueError("r_grid must be an increasing positive grid")
    span = math.log10(r[-1] / r[0])
    if span < 4.0:
        raise ValueError("r_grid must span at least 4 decades")
    masses = np.array([weight.ball_mass(ri, ambient_dim) for ri in r])
    with np.errstate(divide="ignore"):
        ratios = np.where(masses > 0, masses ** (weight.beta / ambient_dim) / r, 0.0)

    def falling(seg: np.ndarray) -> bool:
        if np.any(seg <= 0):
            return False
        return bool(np.all(np.diff(seg) < 0) and seg[-1] <= 0.95 * seg[0])

    head = r <= r[0] * 10.0
    tail = r >= r[-1] / 10.0
    return AdmissibilityReport(
        radii=r,
        ball_masses=masses,
        ratios=ratios,
        ambient_dim=ambient_dim,
        beta=weight.beta,
        passes_small_r=falling(ratios[head]),
        passes_large_r=falling(ratios[tail]),
    )

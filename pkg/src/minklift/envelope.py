"""Piecewise-linear convex functions with exact conjugates and subgradients.

A function is stored as a max of affine pieces, optionally restricted to a
bounded convex domain (then +inf outside).  Conjugation is exact in this
class: for domain-free functions it is the lower convex hull of the lifted
slope points (p_j, -b_j); for domain-restricted functions it enumerates the
vertices of the epigraph and conjugates those.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from .errors import DegenerateHull, OutsideDomain

#: relative tolerance deciding which pieces are active at a point
ACTIVATION_TOL = 1e-10


@dataclass(frozen=True)
class ConvexRegion:
    """Full-dimensional convex polytope in R^1 or R^2 (an effective domain)."""

    vertices: np.ndarray  # (V, n); sorted in 1-d, CCW in 2-d
    normals: np.ndarray   # (F, n) outward unit edge normals
    offsets: np.ndarray   # (F,) so that x in region iff normals @ x <= offsets

    def __post_init__(self):
        for name in ("vertices", "normals", "offsets"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=float))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_points(cls, points) -> "ConvexRegion":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        n = pts.shape[1]
        if n == 1:
            lo, hi = float(np.min(pts)), float(np.max(pts))
            if hi - lo <= 1e-12 * max(1.0, abs(hi)):
                raise DegenerateHull("domain degenerates to a point")
            return cls(
                vertices=np.array([[lo], [hi]]),
                normals=np.array([[-1.0], [1.0]]),
                offsets=np.array([-lo, hi]),
            )
        if n != 2:
            raise ValueError("regions are supported in R^1 and R^2 only")
        try:
            hull = ConvexHull(pts)
        except QhullError as exc:
            raise DegenerateHull(f"domain points are affinely dependent: {exc}") from exc
        verts = pts[hull.vertices]  # CCW order in 2-d
        normals = hull.equations[:, :2]
        offsets = -hull.equations[:, 2]
        return cls(vertices=verts, normals=normals, offsets=offsets)

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    def contains(self, x, tol: float = 1e-9) -> np.ndarray:
        """Membership for a point (n,) or batch (k, n); returns bool or bool array."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        slack = pts @ self.normals.T - self.offsets[None, :]
        inside = np.all(slack <= tol * np.maximum(1.0, np.abs(self.offsets))[None, :], axis=1)
        return bool(inside[0]) if single else inside

    def boundary_distance(self, x) -> float:
        """Distance from an interior point to the boundary (min facet slack)."""
        x = np.asarray(x, dtype=float)
        return float(np.min(self.offsets - self.normals @ x))

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """Uniform rejection sampling from the bounding box."""
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        out = []
        while len(out) < k:
            cand = rng.uniform(lo, hi, size=(4 * k, self.dimension))
            out.extend(cand[self.contains(cand)])
        return np.array(out[:k])

    def to_dict(self) -> dict:
        return {"vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class PWLConvexFunction:
    """max_j (slopes[j] . x + intercepts[j]), +inf outside `domain` if set."""

    slopes: np.ndarray
    intercepts: np.ndarray
    domain: ConvexRegion | None = None

    def __post_init__(self):
        slopes = np.atleast_2d(np.asarray(self.slopes, dtype=float))
        intercepts = np.asarray(self.intercepts, dtype=float).ravel()
        if slopes.shape[0] != intercepts.shape[0]:
            raise ValueError("need one intercept per slope")
        if slopes.shape[0] == 0:
            raise ValueError("need at least one affine piece")
        slopes = np.ascontiguousarray(slopes)
        slopes.flags.writeable = False
        intercepts = np.ascontiguousarray(intercepts)
        intercepts.flags.writeable = False
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "intercepts", intercepts)

    @property
    def dimension(self) -> int:
        return self.slopes.shape[1]

    @property
    def n_pieces(self) -> int:
        return self.slopes.shape[0]

    def piece_values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        pts = np.atleast_2d(x)
        return pts @ self.slopes.T + self.intercepts[None, :]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim <= 1
        pts = np.atleast_2d(x).reshape(-1, self.dimension)
        values = np.max(pts @ self.slopes.T + self.intercepts[None, :], axis=1)
        if self.domain is not None:
            values = np.where(self.domain.contains(pts), values, np.inf)
        return float(values[0]) if single else values

    def lipschitz_bound(self) -> float:
        return float(np.max(np.linalg.norm(self.slopes, axis=1)))

    def to_dict(self) -> dict:
        out = {
            "pieces": [
                {"slope": s.tolist(), "intercept": float(b)}
                for s, b in zip(self.slopes, self.intercepts)
            ]
        }
        if self.domain is not None:
            out["domain"] = self.domain.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PWLConvexFunction":
        slopes = np.array([p["slope"] for p in data["pieces"]], dtype=float)
        intercepts = np.array([p["intercept"] for p in data["pieces"]], dtype=float)
        domain = None
        if data.get("domain") is not None:
            domain = ConvexRegion.from_points(np.asarray(data["domain"]["vertices"], float))
        return cls(slopes=slopes, intercepts=intercepts, domain=domain)


def potential_from_body(K) -> PWLConvexFunction:
    """Conjugate of the lower envelope, read directly off the body's vertices.

    Every vertex p = (phat, p_d) of K contributes the piece
    y -> y . phat - p_d, so the result equals the support function
    y -> h_K((y, -1)) and is finite on all of R^(d-1).  Vertices that never
    touch the lower boundary (no incident facet with a downward normal) give
    pieces that are never active; they are pruned.
    """
    verts = np.asarray(K.vertices, dtype=float)
    lower_ids: set[int] = set()
    for f in K.facets:
        if f.normal.coords[-1] < -1e-12:
            lower_ids.update(f.vertex_indices)
    keep = sorted(lower_ids) if lower_ids else list(range(verts.shape[0]))
    slopes = verts[keep, :-1]
    intercepts = -verts[keep, -1]
    # group numerically identical slopes, keeping the dominant piece
    groups: dict[tuple, int] = {}
    for i, s in enumerate(slopes):
        key = tuple(np.round(s, 12))
        if key not in groups or intercepts[i] > intercepts[groups[key]]:
            groups[key] = i
    idx = sorted(groups.values())
    return PWLConvexFunction(slopes=slopes[idx], intercepts=intercepts[idx])


def subgradient(f: PWLConvexFunction, x, tol: float = ACTIVATION_TOL) -> np.ndarray:
    """Generators (vertices) of the subdifferential at x: the active slopes.

    Activation is decided within a relative tolerance on piece values; ties
    at the tolerance boundary are included, so the returned set can only be
    too large, never too small.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if f.domain is not None and not f.domain.contains(x):
        raise OutsideDomain(f"{x.tolist()} is outside the effective domain")
    values = f.piece_values(x)[0]
    top = np.max(values)
    active = np.flatnonzero(values >= top - tol * max(1.0, abs(top)))
    seen: dict[tuple, int] = {}
    for i in active:
        seen.setdefault(tuple(np.round(f.slopes[i], 12)), int(i))
    return f.slopes[sorted(seen.values())]


def _lower_hull_pieces(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Affine pieces of the convex function whose graph is the lower hull
    of `points` (k, n+1); returns (slopes, intercepts)."""
    n = points.shape[1] - 1
    if n == 1:
        order = np.lexsort((points[:, 1], points[:, 0]))
        pts = points[order]
        chain: list[np.ndarray] = []
        for p in pts:
            if chain and abs(p[0] - chain[-1][0]) <= 1e-14 * max(1.0, abs(p[0])):
                if p[1] < chain[-1][1]:
                    chain[-1] = p
                continue
            while len(chain) >= 2:
                a, b = chain[-2], chain[-1]
                if (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        if len(chain) < 2:
            raise DegenerateHull("conjugate of an affine function is not polyhedral")
        slopes, intercepts = [], []
        for a, b in zip(chain[:-1], chain[1:]):
            m = (b[1] - a[1]) / (b[0] - a[0])
            slopes.append([m])
            intercepts.append(a[1] - m * a[0])
        return np.array(slopes), np.array(intercepts)
    # n == 2: lower hull in R^3
    centered = points - points.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1.0):
        # all lifted points on one plane: a single affine piece fits exactly
        A = np.column_stack([points[:, :2], np.ones(points.shape[0])])
        coef, *_ = np.linalg.lstsq(A, points[:, 2], rcond=None)
        return coef[:2][None, :], np.array([coef[2]])
    hull = ConvexHull(points)
    eq = hull.equations
    down = eq[:, 2] < -1e-12
    if not np.any(down):
        raise DegenerateHull("lifted points have no lower hull")
    a, off = eq[down, :3], eq[down, 3]
    slopes = -a[:, :2] / a[:, 2:3]
    intercepts = -off / a[:, 2]
    return slopes, intercepts


def _epigraph_vertices(f: PWLConvexFunction) -> np.ndarray:
    """Vertices (x_k, f(x_k)) of the graph of a domain-restricted PWL function."""
    dom = f.domain
    assert dom is not None
    n = f.dimension
    f_on_verts = f.piece_values(dom.vertices).max(axis=1)
    top = float(np.max(f_on_verts)) + 2.0
    # halfspace rows [a, b] encode a . (x, t) + b <= 0
    rows = [np.concatenate([dom.normals, np.zeros((dom.normals.shape[0], 1)),
                            -dom.offsets[:, None]], axis=1)]
    rows.append(np.concatenate([f.slopes, -np.ones((f.n_pieces, 1)),
                                f.intercepts[:, None]], axis=1))
    cap = np.zeros((1, n + 2))
    cap[0, n] = 1.0
    cap[0, n + 1] = -top
    rows.append(cap)
    halfspaces = np.vstack(rows)
    x0 = dom.vertices.mean(axis=0)
    t0 = float(f(x0)) + 0.5
    try:
        inter = HalfspaceIntersection(halfspaces, np.concatenate([x0, [t0]]))
    except QhullError as exc:
        raise DegenerateHull(f"degenerate epigraph: {exc}") from exc
    pts = inter.intersections
    pts = pts[pts[:, -1] < top - 1.0]
    # merge duplicate intersection points (facets meeting at one vertex)
    out: list[np.ndarray] = []
    for p in pts:
        if not any(np.linalg.norm(p - q) <= 1e-9 * max(1.0, np.linalg.norm(p)) for q in out):
            out.append(p)
    return np.array(out)


def legendre_transform(f: PWLConvexFunction) -> PWLConvexFunction:
    """Exact Fenchel conjugate f*(y) = sup_x {y . x - f(x)}.

    Domain-free input: f* lives on the convex hull of the slopes and is the
    lower hull of the lifted points (slope_j, -intercept_j).  Input with a
    bounded domain: f* is finite everywhere, with one piece per vertex of
    the graph of f.
    """
    if f.domain is None:
        lifted = np.column_stack([f.slopes, -f.intercepts])
        slopes, intercepts = _lower_hull_pieces(lifted)
        domain = ConvexRegion.from_points(f.slopes)
        return PWLConvexFunction(slopes=slopes, intercepts=intercepts, domain=domain)
    graph = _epigraph_vertices(f)
    return PWLConvexFunction(slopes=graph[:, :-1], intercepts=-graph[:, -1])

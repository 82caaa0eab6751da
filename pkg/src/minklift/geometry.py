"""Convex polytopes in R^2 and R^3 built from support data.

A body is described by outer unit normals and positive support values,
K = {x : x . xi_i <= h_i}, and realized by polar duality: the convex hull
of the dual points xi_i / h_i is computed, and its facet planes are mapped
back to the vertices of K.  Each construction normal keeps its contact
facet (possibly empty or degenerate), so callers always see one facet per
normal, in input order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateHull, NoLowerFacets, UnboundedBody, UnknownNormal
from .validation import check_unit_rows, spans_space

#: chord distance under which two input normals count as coincident
PARALLEL_TOL = 1e-9
#: relative tolerance used for vertex/plane contact decisions
CONTACT_TOL = 1e-9


@dataclass(frozen=True)
class Direction:
    """A unit vector in R^2 or R^3; constructor input is normalized."""

    coords: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.coords, dtype=float).reshape(-1)
        if v.shape[0] not in (2, 3):
            raise ValueError("direction must live in R^2 or R^3")
        norm = float(np.linalg.norm(v))
        if not np.isfinite(norm) or norm == 0.0:
            raise ValueError("direction must be a nonzero finite vector")
        v = v / norm
        v.flags.writeable = False
        object.__setattr__(self, "coords", v)

    @property
    def dimension(self) -> int:
        return self.coords.shape[0]

    def __neg__(self) -> "Direction":
        return Direction(-self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def _face_area(vertices: np.ndarray, ambient: int) -> float:
    """Hausdorff measure of a (d-1)-face: segment length or polygon area."""
    k = vertices.shape[0]
    if ambient == 2:
        return float(np.linalg.norm(vertices[1] - vertices[0])) if k == 2 else 0.0
    if k < 3:
        return 0.0
    c = vertices.mean(axis=0)
    total = np.zeros(3)
    for i in range(k):
        total += np.cross(vertices[i] - c, vertices[(i + 1) % k] - c)
    return float(np.linalg.norm(total)) / 2.0


@dataclass(frozen=True)
class Facet:
    """Contact set of one construction normal, with its (d-1)-measure.

    `vertices` are ordered left-to-right along the edge tangent in 2-d and
    counterclockwise about the outward normal in 3-d.  Inactive facets
    (support plane missing the body) carry an empty vertex list and area 0.
    """

    normal: Direction
    support: float
    vertices: np.ndarray
    vertex_indices: tuple[int, ...] = ()
    area: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.size == 0:
            v = np.zeros((0, self.normal.dimension))
        v = np.ascontiguousarray(v)
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        if self.area is None:
            object.__setattr__(self, "area", _face_area(v, self.normal.dimension))

    @property
    def is_active(self) -> bool:
        return self.vertices.shape[0] > 0

    @property
    def dimension(self) -> int:
        return self.normal.dimension


@dataclass(frozen=True)
class Polytope:
    """Bounded symmetric-capable convex body with origin in its interior."""

    vertices: np.ndarray
    facets: tuple[Facet, ...]
    dimension: int

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "facets", tuple(self.facets))

    @property
    def normals(self) -> np.ndarray:
        return np.array([f.normal.coords for f in self.facets])

    @property
    def supports(self) -> np.ndarray:
        return np.array([f.support for f in self.facets])

    def support(self, direction) -> float:
        """Support function h_K(xi) = max_{x in K} x . xi."""
        xi = np.asarray(getattr(direction, "coords", direction), dtype=float)
        return float(np.max(self.vertices @ xi))

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        slack = self.normals @ x - self.supports
        return bool(np.all(slack <= tol * np.maximum(1.0, np.abs(self.supports))))

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "vertices": self.vertices.tolist(),
            "facets": [
                {
                    "normal": f.normal.coords.tolist(),
                    "support": f.support,
                    "vertex_indices": list(f.vertex_indices),
                    "area": f.area,
                }
                for f in self.facets
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Polytope":
        vertices = np.asarray(data["vertices"], dtype=float)
        facets = []
        for rec in data["facets"]:
            idx = tuple(int(i) for i in rec["vertex_indices"])
            facets.append(
                Facet(
                    normal=Direction(np.asarray(rec["normal"], dtype=float)),
                    support=float(rec["support"]),
                    vertices=vertices[list(idx)] if idx else np.zeros((0, len(rec["normal"]))),
                    vertex_indices=idx,
                    area=float(rec["area"]),
                )
            )
        return cls(vertices=vertices, facets=tuple(facets), dimension=int(data["dimension"]))


def _dedup_points(points: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Greedy merge of nearly identical points; returns (unique, index_map)."""
    unique: list[np.ndarray] = []
    index_map = np.empty(points.shape[0], dtype=int)
    for i, p in enumerate(points):
        for j, q in enumerate(unique):
            if np.linalg.norm(p - q) <= tol:
                index_map[i] = j
                break
        else:
            index_map[i] = len(unique)
            unique.append(p)
    return np.array(unique), index_map


def _order_face_vertices(vertices: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Deterministic vertex order: by tangent in 2-d, CCW about normal in 3-d."""
    if vertices.shape[0] <= 1:
        return np.arange(vertices.shape[0])
    if normal.shape[0] == 2:
        tangent = np.array([-normal[1], normal[0]])
        return np.argsort(vertices @ tangent, kind="stable")
    # right-handed in-plane frame (t1, t2) with t1 x t2 = normal
    axis = np.argmin(np.abs(normal))
    seed = np.zeros(3)
    seed[axis] = 1.0
    t1 = seed - (seed @ normal) * normal
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(normal, t1)
    rel = vertices - vertices.mean(axis=0)
    angles = np.arctan2(rel @ t2, rel @ t1)
    return np.argsort(angles, kind="stable")


def build_polytope(normals, supports) -> Polytope:
    """Intersect halfspaces {x . xi_i <= h_i} into a bounded polytope.

    Computed by polar duality: the convex hull of the dual points xi_i/h_i
    is dualized back, so its facet planes become the vertices of the body.
    Normals whose plane misses the body are reported as inactive facets
    (no vertices, area 0), never dropped.

    Raises UnboundedBody when the normals cannot enclose a bounded body and
    DegenerateHull when the dual points are affinely dependent beyond
    tolerance (checked in that order).
    """
    N = check_unit_rows(normals)
    h = np.asarray(supports, dtype=float).ravel()
    if h.shape[0] != N.shape[0]:
        raise ValueError("need one support value per normal")
    if np.any(h <= 0) or not np.all(np.isfinite(h)):
        raise ValueError("support values must be finite and > 0")
    d = N.shape[1]
    if N.shape[0] < d + 1:
        raise ValueError(f"need at least {d + 1} normals in R^{d}")
    # coincident normals change the target measure; merging belongs upstream
    gram = N @ N.T
    np.fill_diagonal(gram, 0.0)
    close = np.argwhere(2.0 - 2.0 * gram <= PARALLEL_TOL**2)
    if close.size:
        i, j = close[0]
        raise ValueError(f"normals {i} and {j} are coincident within {PARALLEL_TOL:g}")
    if not spans_space(N):
        raise UnboundedBody("normals do not span the ambient space")

    dual_points = N / h[:, None]
    try:
        hull = ConvexHull(dual_points)
    except QhullError as exc:
        raise DegenerateHull(f"dual points are affinely dependent: {exc}") from exc
    offsets = hull.equations[:, -1]
    if np.any(offsets >= -1e-12):
        raise UnboundedBody("normals do not positively span the ambient space")

    # each dual hull plane a.y = -offset becomes the body vertex a/(-offset)
    raw_vertices = hull.equations[:, :d] / (-offsets[:, None])
    scale = max(1.0, float(np.max(np.abs(raw_vertices))))
    vertices, _ = _dedup_points(raw_vertices, tol=CONTACT_TOL * scale)

    slack = vertices @ N.T - h[None, :]
    if np.max(slack) > 1e-7 * max(1.0, float(np.max(np.abs(h)))):
        raise DegenerateHull("dual hull produced an infeasible vertex")

    facets = []
    for i in range(N.shape[0]):
        ctol = CONTACT_TOL * max(1.0, abs(h[i]), scale)
        touching = np.flatnonzero(slack[:, i] >= -ctol)
        face_pts = vertices[touching]
        order = _order_face_vertices(face_pts, N[i])
        idx = tuple(int(touching[k]) for k in order)
        facets.append(
            Facet(
                normal=Direction(N[i]),
                support=float(h[i]),
                vertices=vertices[list(idx)] if idx else np.zeros((0, d)),
                vertex_indices=idx,
            )
        )
    return Polytope(vertices=vertices, facets=tuple(facets), dimension=d)


def facet_for_normal(K: Polytope, direction) -> Facet:
    """Contact facet of a construction normal (the reverse spherical image).

    The direction must be one of the normals K was built with; anything
    else raises UnknownNormal.
    """
    xi = np.asarray(getattr(direction, "coords", direction), dtype=float)
    xi = xi / np.linalg.norm(xi)
    dists = np.linalg.norm(K.normals - xi[None, :], axis=1)
    best = int(np.argmin(dists))
    if dists[best] > PARALLEL_TOL:
        raise UnknownNormal(f"direction {xi.tolist()} is not a construction normal")
    return K.facets[best]


def polar_dual(K: Polytope) -> Polytope:
    """Polar body K* = {y : y . x <= 1 for all x in K} (origin interior)."""
    norms = np.linalg.norm(K.vertices, axis=1)
    return build_polytope(K.vertices / norms[:, None], 1.0 / norms)


def lower_envelope(K: Polytope):
    """Lower envelope w(x) = inf{t : x + t e_d in K} as a PWL convex function.

    The descent direction is the last coordinate axis.  Every facet whose
    normal has a negative last component xi = (xihat, s), s < 0, contributes
    the affine piece x -> (x . xihat - h) / (-s); the effective domain is
    the projection of K onto the first d-1 coordinates, and w = +inf
    outside it.
    """
    from .envelope import ConvexRegion, PWLConvexFunction

    d = K.dimension
    normals = K.normals
    supports = K.supports
    lower = np.flatnonzero(normals[:, -1] < -1e-12)
    if lower.size == 0:
        raise NoLowerFacets("no facet has a downward normal")
    s = normals[lower, -1]
    slopes = normals[lower, :-1] / (-s[:, None])
    intercepts = supports[lower] / s
    domain = ConvexRegion.from_points(K.vertices[:, :-1])
    return PWLConvexFunction(slopes=slopes, intercepts=intercepts, domain=domain)

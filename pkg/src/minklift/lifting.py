"""Atomic measures on R^n and their symmetrized lift to the sphere.

An atom at x with mass m becomes the antipodal direction pair
+- (x, -1)/sqrt(1 + |x|^2), each carrying mass m * sqrt(1 + |x|^2).  The
square-root factor compensates the projection distortion of the lift map,
so spherical cap masses match the corrected measure downstairs.  Nothing
is ever placed on the equator: the trivial zero extension is fixed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConcentratedOnHyperplane
from .geometry import Direction
from .minkowski import MinkowskiTarget
from .validation import check_masses, check_points, spans_space

#: atoms closer than this merge at ingestion, with masses summed
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class DirectionalMeasure:
    """Finite atomic measure on R^n: points (m, n) and positive masses (m,)."""

    dimension: int
    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pts = check_points(self.points, "points", dimension=self.dimension)
        masses = check_masses(self.masses, pts.shape[0])
        pts = np.ascontiguousarray(pts)
        pts.flags.writeable = False
        masses = np.ascontiguousarray(masses)
        masses.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def from_atoms(cls, points, masses) -> "DirectionalMeasure":
        """Build a measure, merging duplicate positions within 1e-9.

        Merging happens here, upstream of the geometry (which rejects
        near-parallel normals outright), so coincident masses add.
        """
        pts = check_points(points)
        masses = check_masses(masses, pts.shape[0])
        kept_pts: list[np.ndarray] = []
        kept_masses: list[float] = []
        for p, m in zip(pts, masses):
            for i, q in enumerate(kept_pts):
                if np.linalg.norm(p - q) <= MERGE_TOL:
                    kept_masses[i] += m
                    break
            else:
                kept_pts.append(p)
                kept_masses.append(float(m))
        return cls(
            dimension=pts.shape[1],
            points=np.array(kept_pts),
            masses=np.array(kept_masses),
        )

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def spans_affinely(self) -> bool:
        """True unless all atoms sit on one affine hyperplane."""
        augmented = np.column_stack([self.points, np.ones(self.n_atoms)])
        return spans_space(augmented)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "atoms": [
                {"x": p.tolist(), "mass": float(m)}
                for p, m in zip(self.points, self.masses)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DirectionalMeasure":
        pts = [rec["x"] for rec in data["atoms"]]
        masses = [rec["mass"] for rec in data["atoms"]]
        return cls.from_atoms(pts, masses)


def lift_point(x) -> Direction:
    """Map x in R^n to the unit direction (x, -1)/sqrt(1 + |x|^2).

    The image lies in the open lower hemisphere, the map is injective, and
    affine hyperplanes land inside great subspheres.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    return Direction(np.concatenate([x, [-1.0]]))


def reweight_for_lift(measure: DirectionalMeasure) -> DirectionalMeasure:
    """Scale each mass by sqrt(1 + |x|^2); supports are unchanged."""
    factors = np.sqrt(1.0 + np.sum(measure.points**2, axis=1))
    return DirectionalMeasure(
        dimension=measure.dimension,
        points=measure.points,
        masses=measure.masses * factors,
    )


def symmetrized_lift(measure: DirectionalMeasure) -> MinkowskiTarget:
    """Lift the reweighted atoms and mirror them through the origin.

    Output normals are [L(x_1), ..., L(x_m), -L(x_1), ..., -L(x_m)] with the
    reweighted mass repeated on each antipodal pair, so the total spherical
    mass is exactly twice the reweighted total.  Raises
    ConcentratedOnHyperplane when the atoms cannot span (a single antipodal
    cluster of directions cannot feed the body solver).
    """
    if not measure.spans_affinely():
        raise ConcentratedOnHyperplane(
            "atoms lie on an affine hyperplane; the lifted directions cannot span"
        )
    corrected = reweight_for_lift(measure)
    scale = np.sqrt(1.0 + np.sum(measure.points**2, axis=1))
    lower = np.column_stack([measure.points, -np.ones(measure.n_atoms)]) / scale[:, None]
    normals = np.vstack([lower, -lower])
    masses = np.concatenate([corrected.masses, corrected.masses])
    return MinkowskiTarget(normals=normals, masses=masses)

"""Lift of atomic measures: the sphere map, reweighting, symmetrization."""

import numpy as np
import pytest

import minklift as mk
from minklift.errors import ConcentratedOnHyperplane

from conftest import generic_atoms


def test_lift_point_examples():
    south = mk.lift_point(np.array([0.0]))
    assert np.array_equal(south.coords, [0.0, -1.0])
    d = mk.lift_point(np.array([1.0]))
    assert np.allclose(d.coords, [1 / np.sqrt(2), -1 / np.sqrt(2)], atol=1e-15)
    assert d.coords[-1] < 0


def test_lift_is_injective_into_lower_hemisphere(rng):
    pts = rng.normal(size=(40, 2)) * 3
    lifted = np.array([mk.lift_point(p).coords for p in pts])
    assert np.all(lifted[:, -1] < 0)
    dists = np.linalg.norm(lifted[:, None, :] - lifted[None, :, :], axis=2)
    np.fill_diagonal(dists, np.inf)
    assert np.min(dists) > 0


def test_lift_sends_lines_into_great_circles():
    base = np.array([0.3, -0.7])
    direction = np.array([1.0, 0.5])
    pts = [base + t * direction for t in (-2.0, 0.4, 3.1)]
    lifted = np.array([mk.lift_point(p).coords for p in pts])
    # coplanar with the origin: the 3x3 determinant vanishes
    assert abs(np.linalg.det(lifted)) <= 1e-12


def test_reweighting_masses():
    measure = mk.DirectionalMeasure.from_atoms([[0.0], [1.0]], [2.0, 1.0])
    out = mk.reweight_for_lift(measure)
    assert out.masses[0] == pytest.approx(2.0, abs=0)
    assert out.masses[1] == pytest.approx(np.sqrt(2.0), rel=1e-15)
    assert np.array_equal(out.points, measure.points)
    assert out.total_mass >= measure.total_mass


def test_duplicate_atoms_merge_at_ingestion():
    measure = mk.DirectionalMeasure.from_atoms(
        [[0.5, 0.5], [0.5, 0.5 + 1e-12], [1.0, 0.0]], [1.0, 2.0, 0.5]
    )
    assert measure.n_atoms == 2
    assert measure.masses[0] == pytest.approx(3.0)
    with pytest.raises(ValueError):
        mk.DirectionalMeasure.from_atoms([[0.0]], [-1.0])


def test_single_atom_fails_spanning():
    measure = mk.DirectionalMeasure.from_atoms([[0.0]], [1.0])
    with pytest.raises(ConcentratedOnHyperplane):
        mk.symmetrized_lift(measure)


def test_collinear_atoms_fail_spanning():
    pts = [[t, 2.0 * t - 1.0] for t in (-1.0, 0.0, 0.5, 2.0)]
    measure = mk.DirectionalMeasure.from_atoms(pts, np.ones(4))
    with pytest.raises(ConcentratedOnHyperplane):
        mk.symmetrized_lift(measure)


def test_three_point_line_example():
    measure = mk.DirectionalMeasure.from_atoms([[-1.0], [0.0], [1.0]], np.ones(3))
    target = mk.symmetrized_lift(measure)
    assert target.n_normals == 6
    s = np.sqrt(2.0)
    expected = {
        (-1 / s, -1 / s): s, (0.0, -1.0): 1.0, (1 / s, -1 / s): s,
        (1 / s, 1 / s): s, (0.0, 1.0): 1.0, (-1 / s, 1 / s): s,
    }
    for xi, a in zip(target.normals, target.masses):
        key = min(expected, key=lambda k: np.linalg.norm(xi - np.array(k)))
        assert np.linalg.norm(xi - np.array(key)) <= 1e-12
        assert a == pytest.approx(expected[key], rel=1e-15)
    # evenness cancels the first moment pair by pair, exactly
    for i, j in target.pairs:
        pair_sum = target.masses[i] * target.normals[i] + target.masses[j] * target.normals[j]
        assert np.array_equal(pair_sum, np.zeros(2))
    assert np.linalg.norm(target.masses @ target.normals) <= 1e-15


def test_mass_bookkeeping_exact(rng):
    pts = generic_atoms(rng, 6, 2)
    masses = rng.uniform(0.5, 2.0, size=6)
    measure = mk.DirectionalMeasure.from_atoms(pts, masses)
    target = mk.symmetrized_lift(measure)
    expected = 2.0 * np.sum(masses * np.sqrt(1.0 + np.sum(pts**2, axis=1)))
    assert np.sum(target.masses) == pytest.approx(expected, rel=1e-15)


def test_no_antipodal_collisions(rng):
    pts = generic_atoms(rng, 7, 2)
    target = mk.symmetrized_lift(mk.DirectionalMeasure.from_atoms(pts, np.ones(7)))
    lower = target.normals[:7]
    upper = target.normals[7:]
    assert np.all(lower[:, -1] < -1e-9)
    assert np.all(upper[:, -1] > 1e-9)


def test_cap_pushforward_matches_atom_membership(rng):
    pts = generic_atoms(rng, 8, 2)
    masses = rng.uniform(0.5, 2.0, size=8)
    measure = mk.DirectionalMeasure.from_atoms(pts, masses)
    corrected = mk.reweight_for_lift(measure)
    target = mk.symmetrized_lift(measure)
    for _ in range(20):
        center = rng.normal(size=3)
        center[-1] = -abs(center[-1]) - 0.3
        center /= np.linalg.norm(center)
        theta = 0.8 * np.arcsin(abs(center[-1]))  # cap stays strictly lower
        cos_t = np.cos(theta)
        cap_mass = float(np.sum(target.masses[target.normals @ center >= cos_t]))
        member = np.array(
            [mk.lift_point(p).coords @ center >= cos_t for p in measure.points]
        )
        assert cap_mass == float(np.sum(corrected.masses[member]))


def test_measure_serialization_roundtrip(rng):
    pts = generic_atoms(rng, 5, 2)
    measure = mk.DirectionalMeasure.from_atoms(pts, rng.uniform(0.5, 2.0, size=5))
    again = mk.DirectionalMeasure.from_dict(measure.to_dict())
    assert np.allclose(again.points, measure.points)
    assert np.allclose(again.masses, measure.masses)

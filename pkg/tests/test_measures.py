"""Weights, facet quadrature, weighted volume, admissibility scan."""

import math

import numpy as np
import pytest
from scipy import integrate

import minklift as mk
from minklift.errors import ZeroMass
from minklift.measures import simplex_measure, simplex_rule

from conftest import random_even_body

GAUSS_AT_ORIGIN_2D = 0.15915494309189535       # 1/(2 pi)
GAUSS_AT_UNIT_2D = 0.09653235263005391         # e^{-1/2}/(2 pi)
SEGMENT_GAUSS = 0.16519087103401667            # adaptive-quadrature oracle, frozen
SQUARE_GAUSS_MASS = 0.4660649426743922         # erf(1/sqrt(2))^2, frozen


def unit_segment_facet():
    return mk.Facet(
        normal=mk.Direction([1.0, 0.0]),
        support=1.0,
        vertices=np.array([[1.0, -1.0], [1.0, 1.0]]),
    )


def test_gaussian_density_values():
    w = mk.Weight.gaussian(beta=0.25)
    assert w(np.array([0.0, 0.0])) == pytest.approx(GAUSS_AT_ORIGIN_2D, rel=1e-14)
    assert w(np.array([0.6, 0.8])) == pytest.approx(GAUSS_AT_UNIT_2D, rel=1e-14)
    # ambient dimension changes the normalization
    assert w(np.array([0.0, 0.0, 0.0])) == pytest.approx(
        (2 * math.pi) ** -1.5, rel=1e-14
    )


def test_constant_and_profile_densities():
    w = mk.Weight.constant(3.0)
    assert w(np.array([17.0, -4.0])) == 3.0
    prof = mk.Weight.radial_profile([[0.0, 1.0], [1.0, 0.5], [2.0, 0.0]], beta=0.4)
    assert prof(np.array([0.5, 0.0])) == pytest.approx(0.75)
    assert prof(np.array([0.0, 3.0])) == 0.0  # held at the last level


def test_densities_exactly_even(rng):
    pts2 = rng.normal(size=(50, 2))
    pts3 = rng.normal(size=(50, 3))
    for w in (
        mk.Weight.constant(2.0),
        mk.Weight.gaussian(beta=0.25),
        mk.Weight.radial_profile([[0.0, 1.0], [5.0, 0.2]], beta=0.4),
    ):
        assert np.array_equal(w.density(pts2), w.density(-pts2))
        assert np.array_equal(w.density(pts3), w.density(-pts3))
        assert np.all(w.density(pts3) >= 0)


def test_weight_validation():
    with pytest.raises(ValueError):
        mk.Weight.constant(-1.0)
    with pytest.raises(ValueError):
        mk.Weight.gaussian(beta=0.0)
    with pytest.raises(ValueError):
        mk.Weight.radial_profile([[0.0, 1.0]], beta=0.4)
    with pytest.raises(ValueError):
        mk.Weight.gaussian(beta=0.6).validate_beta(2)
    mk.Weight.gaussian(beta=0.25).validate_beta(2)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        mk.QuadratureSpec(order=1)
    with pytest.raises(ValueError):
        mk.QuadratureSpec(mc_samples=10)


def test_simplex_rule_exact_measure():
    tri = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
    _, w = simplex_rule(tri, order=4)
    assert w.sum() == pytest.approx(1.0, rel=1e-13)
    tet = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    _, w = simplex_rule(tet, order=4)
    assert w.sum() == pytest.approx(1 / 6, rel=1e-13)
    assert simplex_measure(tet) == pytest.approx(1 / 6, rel=1e-13)


def test_constant_weight_recovers_facet_area(square_body, cube_body):
    w = mk.Weight.constant(1.0)
    for K in (square_body, cube_body):
        for f in K.facets:
            assert mk.weighted_facet_area(f, w) == pytest.approx(f.area, rel=1e-13)


def test_gaussian_segment_against_quadrature_oracle():
    w = mk.Weight.gaussian(beta=0.25)
    got = mk.weighted_facet_area(unit_segment_facet(), w)
    oracle, err = integrate.quad(
        lambda t: math.exp(-0.5 * (1.0 + t * t)) / (2 * math.pi), -1.0, 1.0
    )
    assert err < 1e-12
    assert got == pytest.approx(oracle, abs=1e-9)
    assert got == pytest.approx(SEGMENT_GAUSS, abs=1e-9)


def test_gauss_legendre_matches_monte_carlo(rng, cube_body):
    w = mk.Weight.gaussian(beta=1 / 6)
    quad = mk.QuadratureSpec(seed=3)
    for f in (cube_body.facets[0], cube_body.facets[5]):
        gl = mk.weighted_facet_area(f, w, quad)
        mc, stderr = mk.weighted_facet_area_mc(f, w, quad)
        assert abs(gl - mc) <= 3.0 * stderr
    K = random_even_body(rng, n_pairs=5, dim=2)
    f = max(K.facets, key=lambda f: f.area)
    gl = mk.weighted_facet_area(f, mk.Weight.gaussian(beta=0.25), quad)
    mc, stderr = mk.weighted_facet_area_mc(f, mk.Weight.gaussian(beta=0.25), quad)
    assert abs(gl - mc) <= 3.0 * stderr


def test_doubling_order_is_stable(square_body, cube_body):
    w2 = mk.Weight.gaussian(beta=0.25)
    w3 = mk.Weight.gaussian(beta=1 / 6)
    for K, w in ((square_body, w2), (cube_body, w3)):
        for f in K.facets:
            lo = mk.weighted_facet_area(f, w, mk.QuadratureSpec(order=8))
            hi = mk.weighted_facet_area(f, w, mk.QuadratureSpec(order=16))
            assert abs(hi - lo) < 1e-8
        vlo = mk.weighted_volume(K, w, mk.QuadratureSpec(order=8))
        vhi = mk.weighted_volume(K, w, mk.QuadratureSpec(order=16))
        assert abs(vhi - vlo) < 1e-8


def test_weighted_volume_examples(square_body):
    assert mk.weighted_volume(square_body, mk.Weight.constant(1.0)) == pytest.approx(
        4.0, rel=1e-13
    )
    got = mk.weighted_volume(square_body, mk.Weight.gaussian(beta=0.25))
    oracle = math.erf(1.0 / math.sqrt(2.0)) ** 2
    assert got == pytest.approx(oracle, abs=1e-10)
    assert got == pytest.approx(SQUARE_GAUSS_MASS, abs=1e-10)


def test_weighted_volume_polygon_ball_tracks_radial_mass():
    r, m = 1.1, 64
    angles = 2 * np.pi * np.arange(m) / m
    K = mk.build_polytope(
        np.column_stack([np.cos(angles), np.sin(angles)]), np.full(m, r)
    )
    got = mk.weighted_volume(K, mk.Weight.gaussian(beta=0.25))
    inner = 1.0 - math.exp(-0.5 * r * r)
    outer = 1.0 - math.exp(-0.5 * (r / math.cos(math.pi / m)) ** 2)
    assert inner - 1e-12 <= got <= outer + 1e-12


def test_volume_monotone_under_inclusion():
    normals = np.vstack([np.eye(3), -np.eye(3)])
    small = mk.build_polytope(normals, np.full(6, 1.0))
    large = mk.build_polytope(normals, np.full(6, 1.2))
    for w in (mk.Weight.constant(1.0), mk.Weight.gaussian(beta=1 / 6)):
        assert mk.weighted_volume(small, w) <= mk.weighted_volume(large, w) + 1e-9


def test_weighted_areas_even_on_symmetric_bodies(rng):
    for dim in (2, 3):
        K = random_even_body(rng, n_pairs=5, dim=dim)
        w = mk.Weight.gaussian(beta=1.0 / (2 * dim))
        areas = mk.weighted_surface_measure(K, w)
        normals = K.normals
        for i in range(len(normals)):
            j = int(np.argmin(np.linalg.norm(normals + normals[i][None, :], axis=1)))
            assert areas[i] == pytest.approx(areas[j], abs=1e-9)


def test_normalization_constant_values(square_body):
    unit_mass = mk.Weight.constant(0.25, beta=0.7)
    assert mk.normalization_constant(square_body, unit_mass) == pytest.approx(1.0, rel=1e-12)
    lebesgue = mk.Weight.constant(1.0, beta=0.4)
    assert mk.normalization_constant(square_body, lebesgue) == pytest.approx(
        4.0 ** (0.4 / 2.0 - 1.0), rel=1e-12
    )
    assert 4.0 ** (0.4 / 2.0 - 1.0) == pytest.approx(0.32987697769322355, rel=1e-14)
    gauss = mk.Weight.gaussian(beta=0.4)
    got = mk.normalization_constant(square_body, gauss)
    assert got == pytest.approx(SQUARE_GAUSS_MASS ** (-0.8), rel=1e-9)
    assert got == pytest.approx(1.8418016203763348, rel=1e-9)


def test_zero_mass_raises():
    tiny = mk.build_polytope(
        np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], float), np.full(4, 1e-8)
    )
    with pytest.raises(ZeroMass):
        mk.normalization_constant(tiny, mk.Weight.constant(1.0))


def test_admissibility_constant_disk_closed_form():
    # mu(rB) = pi r^2 so the ratio is pi^(beta/2) r^(beta-1)
    w = mk.Weight.constant(1.0, beta=0.4)
    scan = mk.admissibility_scan(w, ambient_dim=2)
    expected = math.pi ** 0.2 * scan.radii ** (0.4 - 1.0)
    assert np.allclose(scan.ratios, expected, rtol=1e-10)
    idx = int(np.argmin(np.abs(scan.radii - 1.0)))
    assert scan.radii[idx] == pytest.approx(1.0, rel=1e-12)
    assert scan.ratios[idx] == pytest.approx(1.2572741156691851, rel=1e-10)
    assert scan.passed


def test_admissibility_gaussian_passes():
    scan = mk.admissibility_scan(mk.Weight.gaussian(beta=0.25), ambient_dim=2)
    assert scan.passed
    # total mass 1 drives the large-r ratio to 1/r
    tail = scan.radii >= 100.0
    assert np.allclose(scan.ratios[tail], 1.0 / scan.radii[tail], rtol=1e-6)


def test_admissibility_flags_bad_exponent():
    scan = mk.admissibility_scan(mk.Weight.constant(1.0, beta=2.0), ambient_dim=2)
    expected = math.pi ** 1.0 * scan.radii ** (2.0 - 1.0)
    assert np.allclose(scan.ratios, expected, rtol=1e-10)
    assert not scan.passes_large_r
    assert not scan.passed


def test_admissibility_grid_validation():
    w = mk.Weight.constant(1.0, beta=0.4)
    with pytest.raises(ValueError, match="4 decades"):
        mk.admissibility_scan(w, 2, r_grid=np.logspace(-1, 1, 16))
    with pytest.raises(ValueError):
        mk.admissibility_scan(w, 2, r_grid=np.array([1.0, 0.5, 2.0]))


def test_ball_mass_radial_forms():
    gauss = mk.Weight.gaussian(beta=0.25)
    for r in (0.5, 1.0, 2.5):
        assert gauss.ball_mass(r, 2) == pytest.approx(1 - math.exp(-r * r / 2), rel=1e-10)
    const = mk.Weight.constant(2.0)
    assert const.ball_mass(1.5, 3) == pytest.approx(2.0 * 4 / 3 * math.pi * 1.5**3, rel=1e-12)

"""PWL convex functions: potentials, subgradients, Legendre transforms."""

import numpy as np
import pytest

import minklift as mk
from minklift.errors import OutsideDomain

from conftest import random_even_body


def abs_plus_one():
    return mk.PWLConvexFunction(slopes=np.array([[-1.0], [1.0]]), intercepts=np.array([1.0, 1.0]))


def test_potential_of_square_is_abs_plus_one(square_body):
    u = mk.potential_from_body(square_body)
    ys = np.linspace(-3, 3, 41)[:, None]
    assert np.allclose(u(ys), np.abs(ys.ravel()) + 1.0, atol=1e-12)
    w = mk.lower_envelope(square_body)
    assert u(np.zeros((1, 1)))[0] == pytest.approx(-w(np.zeros(1)), abs=1e-12)
    assert u(np.zeros((1, 1)))[0] > 0


def test_potential_equals_support_function(rng):
    for dim in (2, 3):
        K = random_even_body(rng, n_pairs=5, dim=dim)
        u = mk.potential_from_body(K)
        for _ in range(50):
            y = rng.uniform(-3, 3, size=dim - 1)
            xi = np.concatenate([y, [-1.0]])
            assert u(y[None, :])[0] == pytest.approx(K.support(xi), abs=1e-12)


def test_potential_tracks_ball_profile():
    r, m = 0.9, 64
    angles = 2 * np.pi * np.arange(m) / m
    K = mk.build_polytope(
        np.column_stack([np.cos(angles), np.sin(angles)]), np.full(m, r)
    )
    u = mk.potential_from_body(K)
    ys = np.linspace(-2.5, 2.5, 41)
    exact = r * np.sqrt(1.0 + ys**2)
    got = u(ys[:, None])
    # inscribed profile from below, within the polygon resolution from above
    assert np.all(got >= exact - 1e-12)
    assert np.max(got - exact) <= r * (1.0 / np.cos(np.pi / m) - 1.0) * np.sqrt(1 + ys.max() ** 2) + 1e-9


def test_subgradient_kink_and_smooth_points():
    u = abs_plus_one()
    assert np.allclose(mk.subgradient(u, [2.0]), [[1.0]])
    kink = mk.subgradient(u, [0.0])
    assert sorted(kink.ravel().tolist()) == [-1.0, 1.0]
    near = mk.subgradient(u, [1e-12])
    assert near.shape[0] == 2  # inclusive at the activation tolerance


def test_subgradient_outside_domain_raises(square_body):
    w = mk.lower_envelope(square_body)
    with pytest.raises(OutsideDomain):
        mk.subgradient(w, [1.5])


def test_subgradient_matches_projected_facet(rng):
    # at x with L(x) equal to a downward construction normal, the
    # subdifferential of the potential is the projected contact facet
    for dim in (2, 3):
        K = random_even_body(rng, n_pairs=5, dim=dim)
        u = mk.potential_from_body(K)
        for f in K.facets:
            xi = f.normal.coords
            if xi[-1] >= -0.2 or not f.is_active or f.area <= 1e-9:
                continue
            x = -xi[:-1] / xi[-1]
            gens = mk.subgradient(u, x, tol=1e-9)
            proj = f.vertices[:, :-1]
            assert gens.shape[0] == proj.shape[0]
            for p in proj:
                assert np.min(np.linalg.norm(gens - p[None, :], axis=1)) <= 1e-8


def test_subgradient_monotonicity(rng):
    K = random_even_body(rng, n_pairs=6, dim=3)
    u = mk.potential_from_body(K)
    for _ in range(200):
        x, y = rng.uniform(-3, 3, size=(2, 2))
        for p in mk.subgradient(u, x):
            for q in mk.subgradient(u, y):
                assert (p - q) @ (x - y) >= -1e-10


def test_legendre_of_abs_plus_one():
    star = mk.legendre_transform(abs_plus_one())
    assert star(np.array([0.0])) == pytest.approx(-1.0, abs=1e-14)
    assert star(np.array([0.7])) == pytest.approx(-1.0, abs=1e-14)
    assert star(np.array([1.5])) == np.inf
    assert np.allclose(sorted(star.domain.vertices.ravel()), [-1, 1])


def test_involution_on_samples(rng, golden_solution):
    u = golden_solution.potential
    ys = rng.uniform(-4, 4, size=(1000, 1))
    uss = mk.legendre_transform(mk.legendre_transform(u))
    assert np.max(np.abs(uss(ys) - u(ys))) <= 1e-10
    f = abs_plus_one()
    fss = mk.legendre_transform(mk.legendre_transform(f))
    assert np.max(np.abs(fss(ys) - f(ys))) <= 1e-10


def test_conjugate_matches_lower_envelope(rng):
    for dim in (2, 3):
        K = random_even_body(rng, n_pairs=5, dim=dim)
        w = mk.lower_envelope(K)
        ustar = mk.legendre_transform(mk.potential_from_body(K))
        xs = w.domain.sample(rng, 100)
        assert np.max(np.abs(ustar(xs) - w(xs))) <= 1e-8
        # and conjugating the envelope recovers the potential
        wstar = mk.legendre_transform(w)
        ys = rng.uniform(-3, 3, size=(100, dim - 1))
        u = mk.potential_from_body(K)
        assert np.max(np.abs(wstar(ys) - u(ys))) <= 1e-8


def test_lipschitz_bound(rng):
    K = random_even_body(rng, n_pairs=6, dim=3)
    u = mk.potential_from_body(K)
    L = u.lipschitz_bound()
    for _ in range(200):
        x, y = rng.uniform(-5, 5, size=(2, 2))
        assert abs(u(x[None])[0] - u(y[None])[0]) <= L * np.linalg.norm(x - y) + 1e-12


def test_coercivity_along_rays(rng):
    K = random_even_body(rng, n_pairs=6, dim=3)
    u = mk.potential_from_body(K)
    w = mk.lower_envelope(K)
    inradius = w.domain.boundary_distance(np.zeros(2))
    assert inradius > 0
    for _ in range(100):
        ray = rng.normal(size=2)
        ray /= np.linalg.norm(ray)
        x = 1e6 * ray
        assert u(x[None])[0] / 1e6 >= inradius - 1e-6


def test_pwl_serialization_roundtrip(square_body):
    w = mk.lower_envelope(square_body)
    again = mk.PWLConvexFunction.from_dict(w.to_dict())
    xs = np.linspace(-0.9, 0.9, 7)[:, None]
    assert np.allclose(again(xs), w(xs), atol=1e-15)
    assert again.domain is not None

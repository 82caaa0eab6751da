"""Shared fixtures: canonical bodies and solved instances reused across tests."""

import numpy as np
import pytest

import minklift as mk

SEED = 20260811


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def square_body():
    normals = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    return mk.build_polytope(normals, np.ones(4))


@pytest.fixture(scope="session")
def cube_body():
    normals = np.vstack([np.eye(3), -np.eye(3)])
    return mk.build_polytope(normals, np.ones(6))


def random_even_normals(rng, n_pairs: int, dim: int) -> np.ndarray:
    """Well-separated even unit normals (no near-parallel pairs)."""
    while True:
        half = rng.normal(size=(n_pairs, dim))
        half /= np.linalg.norm(half, axis=1)[:, None]
        normals = np.vstack([half, -half])
        chords = np.linalg.norm(normals[:, None, :] - normals[None, :, :], axis=2)
        np.fill_diagonal(chords, np.inf)
        if np.min(chords) > 0.02:
            return normals


def random_even_body(rng, n_pairs: int = 5, dim: int = 2):
    normals = random_even_normals(rng, n_pairs, dim)
    supports_half = rng.uniform(0.6, 1.4, size=n_pairs)
    supports = np.concatenate([supports_half, supports_half])
    return mk.build_polytope(normals, supports)


def generic_atoms(rng, m: int, n: int) -> np.ndarray:
    """Random atoms in generic position: spread out and affinely spanning."""
    while True:
        pts = rng.normal(size=(m, n))
        dists = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        np.fill_diagonal(dists, np.inf)
        if np.min(dists) < 0.15:
            continue
        aug = np.column_stack([pts, np.ones(m)])
        if np.linalg.matrix_rank(aug) == n + 1:
            return pts


@pytest.fixture(scope="session")
def golden_solution():
    """Two unit atoms at +-1 on the line, Lebesgue weight: a rotated square."""
    measure = mk.DirectionalMeasure.from_atoms([[-1.0], [1.0]], [1.0, 1.0])
    return mk.solve_instance(measure, mk.Weight.constant(1.0, beta=0.4))


@pytest.fixture(scope="session")
def random_instances():
    """Ten gaussian-weight instances, 5-9 atoms, both dimensions, solved."""
    rng = np.random.default_rng(SEED)
    out = []
    for n in (1, 2):
        weight = mk.Weight.gaussian(beta=1.0 / (2 * (n + 1)))
        for m in (5, 6, 7, 8, 9):
            pts = generic_atoms(rng, m, n)
            masses = rng.uniform(0.5, 1.5, size=m)
            measure = mk.DirectionalMeasure.from_atoms(pts, masses)
            out.append(mk.solve_instance(measure, weight))
    return out

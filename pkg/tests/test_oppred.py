import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aluthge.ensembles import haar_unitary, random_normal, random_projection
from aluthge.errors import DimensionMismatch, NotAProjection
from aluthge.matcore import adj, outer, polar
from aluthge.oppred import (
    bottleneck_distance,
    is_fixed_point,
    is_normal,
    is_orthogonal_projection,
    is_partial_isometry,
    is_quasinormal,
    numerical_range,
    projection_relations,
    spectra_match,
    spectrum,
)
from aluthge.transform import aluthge
from conftest import cgauss

E = np.eye(3, dtype=complex)
N2 = np.array([[0, 1], [0, 0]], dtype=complex)


def brute_force_bottleneck(a, b):
    return min(max(abs(a[i] - b[p[i]]) for i in range(len(a)))
               for p in itertools.permutations(range(len(a))))


class TestPredicates:
    def test_normal(self, rng):
        assert is_normal(haar_unitary(rng, 4))
        assert not is_normal(N2)
        u = haar_unitary(rng, 5)
        assert is_normal((u * cgauss(rng, 5)) @ adj(u))

    def test_quasinormal(self, rng):
        assert is_quasinormal(random_projection(rng, 4, 2))
        assert not is_quasinormal(N2)
        assert is_quasinormal(N2 @ N2)
        assert is_quasinormal(random_normal(rng, 6))

    def test_quasinormal_cross_check_fixed_point(self, rng):
        for _ in range(40):
            t = random_normal(rng, 4)
            assert is_quasinormal(t) and is_fixed_point(t, 0.5)
            g = cgauss(rng, 4, 4)
            assert not is_quasinormal(g) and not is_fixed_point(g, 0.5)

    def test_partial_isometry(self, rng):
        assert is_partial_isometry(np.eye(3))
        assert not is_partial_isometry(np.diag([2.0, 0.0]))
        t = cgauss(rng, 4, 4)
        t[:, 0] = 0
        assert is_partial_isometry(polar(t).V)

    def test_orthogonal_projection(self, rng):
        x = cgauss(rng, 3)
        x /= np.linalg.norm(x)
        assert is_orthogonal_projection(outer(x, x))
        assert not is_orthogonal_projection(outer(E[0], E[1]))
        u = haar_unitary(rng, 3)
        assert not is_orthogonal_projection((np.eye(3) + u) / 2)


class TestProjectionRelations:
    def test_orthogonal_rank_ones(self):
        rel = projection_relations(outer(E[0], E[0]), outer(E[1], E[1]))
        assert rel == {"orthogonal": True, "leq": False, "geq": False}

    def test_below_identity(self):
        assert projection_relations(outer(E[0], E[0]), np.eye(3))["leq"]

    def test_reflexive(self, rng):
        p = random_projection(rng, 4, 2)
        rel = projection_relations(p, p)
        assert rel["leq"] and rel["geq"]

    def test_requires_projections(self):
        with pytest.raises(NotAProjection):
            projection_relations(N2, np.eye(2))

    def test_partial_order_on_commuting_family(self, rng):
        # all coordinate projections of a fixed basis commute
        u = haar_unitary(rng, 4)
        subsets = [s for r in range(5) for s in itertools.combinations(range(4), r)]
        projs = {s: u[:, list(s)] @ adj(u[:, list(s)]) for s in subsets}
        for a, b, c in itertools.product(subsets[::3], repeat=3):
            ab = projection_relations(projs[a], projs[b])["leq"]
            bc = projection_relations(projs[b], projs[c])["leq"]
            ba = projection_relations(projs[b], projs[a])["leq"]
            assert ab == set(a).issubset(b)
            if ab and ba:
                assert a == b
            if ab and bc:
                assert projection_relations(projs[a], projs[c])["leq"]


class TestSpectrum:
    def test_diagonal(self):
        assert sorted(spectrum(np.diag([2.0, 1.0])).eigenvalues.real) == [1, 2]

    def test_nilpotent(self):
        # characteristic polynomial z^2
        assert np.allclose(spectrum(N2).eigenvalues, 0)
        assert np.allclose(spectrum(aluthge(N2, 0.5)).eigenvalues, 0)

    def test_bottleneck_against_brute_force(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 6))
            a, b = cgauss(rng, n), cgauss(rng, n)
            assert bottleneck_distance(a, b) == pytest.approx(brute_force_bottleneck(a, b), abs=1e-15)

    def test_transform_spectra_match(self, rng):
        for _ in range(50):
            t = cgauss(rng, 5, 5)
            assert spectra_match(spectrum(t), spectrum(aluthge(t, 0.5)), 1e-6)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            bottleneck_distance(np.zeros(2), np.zeros(3))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False), min_size=1, max_size=6),
       st.randoms(use_true_random=False))
def test_bottleneck_permutation_invariant(values, rnd):
    a = np.array(values)
    b = a.copy()
    rnd.shuffle(b)
    assert bottleneck_distance(a, b) == 0.0


class TestNumericalRange:
    def test_segment(self):
        poly = numerical_range(np.diag([0.0, 1.0]), 64)
        assert np.allclose(poly.boundary_points.imag, 0, atol=1e-12)
        assert poly.boundary_points.real.min() == pytest.approx(0, abs=1e-12)
        assert poly.boundary_points.real.max() == pytest.approx(1)
        assert poly.is_convex

    def test_nilpotent_disk(self, rng):
        poly = numerical_range(N2, 256)
        assert np.allclose(np.abs(poly.boundary_points), 0.5, atol=1e-6)
        # sampling oracle: Rayleigh quotients fill the disk of radius 1/2
        v = cgauss(rng, 20000, 2)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        rq = np.einsum("ki,ij,kj->k", v.conj(), N2, v)
        assert np.abs(rq).max() <= 0.5 + 1e-12
        assert np.abs(rq).max() > 0.49

    def test_support_values_dominate_samples(self, rng):
        t = cgauss(rng, 4, 4)
        poly = numerical_range(t, 90)
        v = cgauss(rng, 5000, 4)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        rq = np.einsum("ki,ij,kj->k", v.conj(), t, v)
        for theta, z in zip(poly.support_angles, poly.boundary_points):
            rot = np.exp(-1j * theta)
            assert (rot * rq).real.max() <= (rot * z).real + 1e-9

    def test_unitary_invariance(self, rng):
        a = cgauss(rng, 4, 4)
        u = haar_unitary(rng, 4)
        p1 = numerical_range(a, 72, refine_tol=0).boundary_points
        p2 = numerical_range(u @ a @ adj(u), 72, refine_tol=0).boundary_points
        assert np.allclose(p1, p2, atol=1e-9)

    def test_contains_eigenvalues(self, rng):
        for k in range(60):
            n = 1 + k % 8
            t = cgauss(rng, n, n) if k % 2 else random_normal(rng, n)
            poly = numerical_range(t, 360)
            assert poly.is_convex
            for lam in spectrum(t).eigenvalues:
                assert poly.contains(lam, 1e-6)

    def test_unrefined_grid_is_equally_spaced(self):
        poly = numerical_range(np.array([[0, 1], [0, 0]]), 16, refine_tol=0)
        assert np.allclose(np.diff(poly.support_angles), 2 * np.pi / 16)

    def test_refinement_catches_thin_vertex(self):
        # hull vertex 0.76-0.55i has an exterior angle far below the grid spacing
        eig = np.array([1.08 - 0.2336j, -0.4848 + 0.4173j, -0.8978 - 0.7885j,
                        0.9263 - 0.5227j, 0.7588 - 0.5477j])
        coarse = numerical_range(np.diag(eig), 360, refine_tol=0)
        fine = numerical_range(np.diag(eig), 360)
        assert coarse.distance(eig[-1]) > 1e-5
        assert fine.contains(eig[-1], 1e-6)

    def test_distance_outside(self):
        poly = numerical_range(np.diag([0.0, 1.0]), 16)
        assert poly.distance(2.0) == pytest.approx(1.0)
        assert poly.distance(0.5 + 1j) == pytest.approx(1.0)

    def test_minimum_angles(self):
        with pytest.raises(ValueError):
            numerical_range(np.eye(2), 4)


def test_quasinormal_coincides_with_normal(rng):
    for k in range(500):
        n = 1 + k % 8
        t = random_normal(rng, n) if k % 2 else cgauss(rng, n, n)
        assert is_quasinormal(t) == is_normal(t)
        for lam in (0.3, 0.5, 0.7):
            assert is_fixed_point(t, lam) == is_quasinormal(t)

import numpy as np
import pytest

from aluthge.ensembles import haar_unitary
from aluthge.errors import ZeroVector
from aluthge.matcore import adj, fro, outer, polar, spec_norm
from aluthge.oppred import bottleneck_distance, spectrum
from aluthge.transform import aluthge, aluthge_iterate, aluthge_rank_one, duggal
from conftest import cgauss

E1, E2 = np.array([1, 0j]), np.array([0, 1 + 0j])


def closed_form(x, y):
    # written out independently of aluthge_rank_one
    return (np.vdot(y, x) / np.vdot(y, y).real) * np.outer(y, y.conj())


class TestAluthge:
    @pytest.mark.parametrize("lam", [0.0, 0.2, 0.5, 0.9, 1.0])
    def test_projection_is_fixed(self, lam, rng):
        u = haar_unitary(rng, 4)[:, :2]
        p = u @ adj(u)
        assert fro(aluthge(p, lam) - p) < 1e-12

    def test_nilpotent_goes_to_zero(self):
        assert np.allclose(aluthge([[0, 1], [0, 0]], 0.5), 0)

    def test_lambda_zero_is_identity(self, rng):
        for n in range(1, 7):
            t = cgauss(rng, n, n)
            assert fro(aluthge(t, 0.0) - t) <= 1e-9 * fro(t)

    def test_lambda_zero_keeps_singular_nonnormal(self):
        t = np.array([[0, 1], [0, 0]], dtype=complex)
        assert np.allclose(aluthge(t, 0.0), t)

    @pytest.mark.parametrize("lam", [-0.1, 1.5, np.nan])
    def test_bad_lambda(self, lam):
        with pytest.raises(ValueError):
            aluthge(np.eye(2), lam)

    def test_half_matches_explicit_square_roots(self, rng):
        t = cgauss(rng, 5, 5)
        w, s, xh = np.linalg.svd(t)
        root = adj(xh) @ np.diag(np.sqrt(s)) @ xh
        v = w @ xh
        assert fro(aluthge(t, 0.5) - root @ v @ root) <= 1e-12 * fro(t)


class TestRankOne:
    def test_orthogonal_pair(self):
        assert np.allclose(aluthge_rank_one(E1, E2), 0)

    def test_self_pair(self):
        x = np.array([1, 1j]) / np.sqrt(2)
        assert np.allclose(aluthge_rank_one(x, x), outer(x, x))

    def test_formula_value(self):
        x = np.array([1, 1]) / np.sqrt(2)
        expected = np.diag([1 / np.sqrt(2), 0])
        assert np.allclose(aluthge_rank_one(x, E1), expected)
        assert np.allclose(aluthge(outer(x, E1), 0.3), expected)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            aluthge_rank_one(np.zeros(2), E1)

    def test_lambda_endpoints_rejected(self):
        with pytest.raises(ValueError):
            aluthge_rank_one(E1, E2, 0.0)

    def test_general_path_agrees_500(self, rng):
        worst = 0.0
        for k in range(500):
            n = 1 + k % 8
            x, y = cgauss(rng, n), cgauss(rng, n)
            lam = float(rng.uniform(0.01, 0.99))
            scale = np.linalg.norm(x) * np.linalg.norm(y)
            worst = max(worst, fro(aluthge(outer(x, y), lam) - closed_form(x, y)) / scale)
            assert np.allclose(aluthge_rank_one(x, y, lam), closed_form(x, y))
        assert worst <= 1e-10


class TestDuggal:
    def test_unitary(self, rng):
        u = haar_unitary(rng, 4)
        assert fro(duggal(u) - u) < 1e-12

    def test_positive(self, rng):
        g = cgauss(rng, 4, 4)
        p = g @ adj(g)
        assert fro(duggal(p) - p) <= 1e-12 * fro(p)

    def test_composes_polar_factors(self, rng):
        t = cgauss(rng, 5, 5)
        pol = polar(t)
        assert fro(duggal(t) - pol.P @ pol.V) <= 1e-12 * fro(t)


class TestInvariants:
    def test_unitary_covariance_500(self, rng):
        for k in range(500):
            n = 1 + k % 8
            lam = (0.25, 0.5, 0.75)[k % 3]
            t, u = cgauss(rng, n, n), haar_unitary(rng, n)
            lhs = aluthge(u @ t @ adj(u), lam)
            rhs = u @ aluthge(t, lam) @ adj(u)
            assert fro(lhs - rhs) <= 1e-9 * max(1.0, fro(t))

    def test_norm_contraction(self, rng):
        for k in range(300):
            n = 1 + k % 8
            t = cgauss(rng, n, n)
            lam = float(rng.uniform(0, 1))
            assert spec_norm(aluthge(t, lam)) <= spec_norm(t) + 1e-9

    def test_spectrum_preserved_500(self, rng):
        for k in range(500):
            n = 1 + k % 8
            t = cgauss(rng, n, n)
            lam = float(rng.uniform(0, 1))
            gap = bottleneck_distance(spectrum(t), spectrum(aluthge(t, lam)))
            assert gap <= 1e-6 * max(1.0, spec_norm(t))


class TestIterate:
    def test_normal_converges_immediately(self, rng):
        u = haar_unitary(rng, 4)
        t = (u * cgauss(rng, 4)) @ adj(u)
        trace = aluthge_iterate(t, 0.5, max_steps=10, stop_tol=1e-12)
        assert trace.converged and trace.steps == 1
        assert trace.residuals[0] < 1e-12

    def test_nilpotent_two_steps(self):
        # first step: e1 ⊗ e2 -> <e1, e2> e2 ⊗ e2 = 0 ; second: 0 -> 0
        trace = aluthge_iterate(outer(E1, E2), 0.5, max_steps=10, stop_tol=1e-12)
        assert trace.steps == 2 and trace.converged
        assert np.allclose(trace.iterates[1], 0) and np.allclose(trace.iterates[2], 0)
        assert trace.residuals == pytest.approx([1.0, 0.0])

    def test_spectrum_along_iterates(self, rng):
        t = cgauss(rng, 4, 4)
        trace = aluthge_iterate(t, 0.5, max_steps=30, stop_tol=1e-14)
        assert len(trace.residuals) == trace.steps
        assert len(trace.iterates) == trace.steps + 1
        for m in trace.iterates:
            assert bottleneck_distance(spectrum(t), spectrum(m)) <= 1e-6 * max(1.0, spec_norm(t))

    def test_max_steps(self):
        with pytest.raises(ValueError):
            aluthge_iterate(np.eye(2), 0.5, max_steps=0)

import json

import numpy as np
import pytest

from aluthge import laws
from aluthge.ensembles import EnsembleSpec, halton_unit_vectors, trial_rng
from aluthge.matcore import ToleranceConfig, fro, is_psd, outer
from aluthge.oppred import is_quasinormal
from aluthge.serialize import dumps, matrix_from_doc
from aluthge.transform import aluthge

ENS = EnsembleSpec(dims=(1, 2, 3, 4, 5, 6), trials=60, seed=7)


@pytest.mark.parametrize("law", [
    laws.law_covariance_and_spectrum,
    laws.law_fixed_points,
    laws.law_rank_one,
    laws.law_positivity,
    laws.law_projection_compression,
])
@pytest.mark.parametrize("lam", [0.3, 0.5, 0.7])
def test_law_passes(law, lam):
    rep = law(ENS, lam)
    assert rep.passed, rep.worst_witness
    assert rep.max_residual <= rep.threshold
    assert rep.lam == lam and rep.seed == 7


def test_report_invariant_and_replay():
    for rep in laws.run_laws(seed=3, trials=20):
        assert rep.passed == (rep.max_residual <= rep.threshold)
        assert laws.replay_witness(rep) == rep.max_residual


def test_reports_reproducible():
    a = [dumps(r) for r in laws.run_laws(seed=11, trials=15)]
    b = [dumps(r) for r in laws.run_laws(seed=11, trials=15)]
    assert a == b


def test_seed_changes_witness():
    a = laws.law_covariance_and_spectrum(EnsembleSpec(trials=5, seed=1))
    b = laws.law_covariance_and_spectrum(EnsembleSpec(trials=5, seed=2))
    assert a.worst_witness != b.worst_witness


def test_covariance_permutation_case_is_exact():
    t = np.diag([1.0, -2.0, 3j, 0.5])
    u = np.eye(4)[[2, 0, 3, 1]]
    assert laws.CHECKS["covariance"]({"T": t, "U": u}, 0.5, ToleranceConfig()) < 1e-15


def test_covariance_at_lambda_zero():
    rep = laws.law_covariance_and_spectrum(EnsembleSpec(trials=20), 0.0)
    assert rep.passed and rep.max_residual < 1e-12


def test_unit_defects_flag_failures():
    # a non-projection fed to the nilpotent gallery check must register as a defect
    cfg = ToleranceConfig()
    assert laws.CHECKS["nilpotent"]({"T": np.eye(2, dtype=complex)}, 0.5, cfg) == 1.0
    assert laws.CHECKS["compression_control"](
        {"T": np.diag([1, 0]).astype(complex), "P": np.diag([1, 0]).astype(complex)}, 0.5, cfg) == 1.0


class TestGallery:
    def test_index_files_exist(self):
        ids = {e["id"] for e in laws.gallery_index()}
        assert ids == {"nilpotent2", "rank_one_positive_pairing", "reciprocal_1d"}
        for e in laws.gallery_index():
            assert isinstance(laws.gallery_document(e["id"]), dict)

    def test_nilpotent_verdicts(self):
        t = laws.gallery_matrix("nilpotent2")
        assert not is_quasinormal(t)
        assert is_quasinormal(t @ t)
        assert fro(aluthge(t, 0.5)) == 0.0

    def test_pairing_verdicts(self):
        t = laws.gallery_matrix("rank_one_positive_pairing")
        x = np.array([1, 1]) / np.sqrt(2)
        assert np.allclose(t, outer(x, [1, 0]))
        assert not is_psd(t)
        assert is_psd(aluthge(t, 0.5))

    def test_unknown(self):
        with pytest.raises(KeyError):
            laws.gallery_document("nope")


class TestScalarDetector:
    def test_scalar_has_no_witness(self):
        rep = laws.law_scalar_detector(3 * np.eye(3))
        assert rep.passed and rep.trials >= 64
        assert rep.checks["scalar_detector"] == 0.0

    def test_random_scalar(self):
        rng = np.random.default_rng(5)
        alpha = complex(*rng.standard_normal(2))
        assert laws.law_scalar_detector(alpha * np.eye(4)).passed

    def test_diag_hand_values(self):
        # R = diag(1, 2), y = (1, 1)/sqrt2: <Ry, y> = 3/2 and |R*y|^2 = 5/2,
        # so the left side is 1.5 y⊗y and the right side 0.6 (Ry)⊗(Ry)
        r = np.diag([1.0, 2.0]).astype(complex)
        y = np.array([1, 1]) / np.sqrt(2)
        p = outer(y, y)
        ry = r @ y
        assert np.allclose(aluthge(r @ p, 0.5), 1.5 * outer(y, y))
        assert np.allclose(aluthge(p @ r, 0.5), 0.6 * outer(ry, ry))
        assert laws.commutation_gap(r, y) > 0.1
        rep = laws.law_scalar_detector(r)
        assert rep.passed
        assert "strongest separation" in rep.notes[-1]

    def test_nonscalar_gaussian(self):
        rng = np.random.default_rng(9)
        g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        assert laws.law_scalar_detector(g).passed

    def test_halton_candidates_deterministic(self):
        a = halton_unit_vectors(3, 10, seed=0)
        assert np.allclose(a, halton_unit_vectors(3, 10, seed=0))
        assert np.allclose(np.linalg.norm(a, axis=1), 1)


class TestPositivity:
    def test_jordan_block_not_psd(self):
        t = np.array([[1, 1], [0, 1]], dtype=complex)
        assert not is_psd(aluthge(t, 0.5))

    def test_hypothesis_witness_recorded(self):
        rep = laws.law_positivity(EnsembleSpec(trials=8), 0.5)
        (w,) = rep.hypothesis_witnesses
        assert w["transform_psd"] and not w["T_psd"]

    def test_lambda_zero_skips_pairing(self):
        rep = laws.law_positivity(EnsembleSpec(trials=8), 0.0)
        assert rep.passed and not rep.hypothesis_witnesses

    def test_families_cover_both_verdicts(self):
        cfg = ToleranceConfig()
        verdicts = set()
        for i in range(8):
            t, _ = laws._invertible_draw(trial_rng(1, i), 4, i % 4, cfg)
            verdicts.add(is_psd(t))
        assert verdicts == {True, False}


class TestCompression:
    def test_projection_itself(self):
        p = np.diag([1, 1, 0]).astype(complex)
        assert fro(aluthge(p @ p, 0.5) - p) < 1e-14

    def test_identity_against_proper_projection(self):
        p = np.diag([1, 1, 0]).astype(complex)
        assert fro(aluthge(np.eye(3) @ p, 0.5) - np.eye(3)) == pytest.approx(1.0)


def test_run_laws_unknown():
    with pytest.raises(ValueError):
        laws.run_laws(only="bogus")


def test_report_serializes():
    rep = laws.law_rank_one(EnsembleSpec(trials=3), 0.5)
    doc = json.loads(dumps(rep))
    assert set(doc) >= {"law_id", "trials", "max_residual", "worst_witness", "passed", "seed"}
    inputs = doc["worst_witness"]["inputs"]
    assert all(("vector" in v) or ("matrix" in v) for v in inputs.values())
    for v in inputs.values():
        if "matrix" in v:
            matrix_from_doc(v["matrix"])

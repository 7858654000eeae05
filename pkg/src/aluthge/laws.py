"""Executable property suites for the Aluthge transform identities.

Each law is a list of cases. A case names a *check* (a residual function
registered in :data:`CHECKS`) and its inputs. Boolean predicates are
turned into unit defects (0 when the expected verdict holds, 1 otherwise),
so every report satisfies ``passed == (max_residual <= threshold)``.
The worst case's inputs are stored in the report and
:func:`replay_witness` recomputes its residual from them exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .ensembles import (
    EnsembleSpec,
    gaussian,
    gaussian_vector,
    haar_unitary,
    halton_unit_vectors,
    random_normal,
    random_positive,
    random_projection,
    trial_rng,
)
from .matcore import DEFAULT, ToleranceConfig, adj, as_cmatrix, fro, is_psd, outer, spec_norm
from .oppred import (
    bottleneck_distance,
    is_fixed_point,
    is_normal,
    is_quasinormal,
    quasinormality_residual,
    spectrum,
)
from .serialize import complex_from_doc, complex_to_doc, matrix_from_doc, matrix_to_doc
from .transform import aluthge, aluthge_rank_one, check_lambda

LAW_IDS = (
    "covariance_spectrum",
    "fixed_points",
    "rank_one",
    "scalar_detector",
    "positivity",
    "projection_compression",
)


@dataclass
class LawReport:
    law_id: str
    trials: int
    max_residual: float
    worst_witness: dict
    passed: bool
    seed: int
    threshold: float
    lam: float
    checks: dict = field(default_factory=dict)
    hypothesis_witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)


# -- gallery -----------------------------------------------------------------

def gallery_index() -> list:
    return json.loads(resources.files("aluthge.gallery").joinpath("index.json").read_text())


def gallery_document(name: str) -> dict:
    for entry in gallery_index():
        if entry["id"] == name:
            return json.loads(resources.files("aluthge.gallery").joinpath(entry["file"]).read_text())
    raise KeyError(f"no gallery entry {name!r}")


def gallery_matrix(name: str) -> np.ndarray:
    return matrix_from_doc(gallery_document(name))


# -- witness encoding --------------------------------------------------------

def _encode(value):
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return {"matrix": matrix_to_doc(value)}
        return {"vector": [complex_to_doc(z) for z in value]}
    if isinstance(value, complex):
        return {"complex": complex_to_doc(value)}
    return {"real": float(value)}


def _decode(doc):
    if "matrix" in doc:
        return matrix_from_doc(doc["matrix"])
    if "vector" in doc:
        return np.array([complex_from_doc(z) for z in doc["vector"]])
    if "complex" in doc:
        return complex_from_doc(doc["complex"])
    return doc["real"]


def _rel(a, scale=1.0):
    return fro(a) / max(1.0, scale)


# -- checks --------------------------------------------------------------------

def _check_covariance(inp, lam, cfg):
    t, u = inp["T"], inp["U"]
    lhs = aluthge(u @ t @ adj(u), lam, cfg)
    rhs = u @ aluthge(t, lam, cfg) @ adj(u)
    return _rel(lhs - rhs, fro(t))


def _check_spectrum(inp, lam, cfg):
    t = inp["T"]
    gap = bottleneck_distance(spectrum(t), spectrum(aluthge(t, lam, cfg)))
    # expressed in law-threshold units: 1 * tol_law <=> tol_spectrum
    return gap / max(1.0, spec_norm(t)) * cfg.tol_law / cfg.tol_spectrum


def _check_fixed(inp, lam, cfg):
    t = inp["T"]
    return _rel(aluthge(t, lam, cfg) - t, fro(t))


def _check_fixed_iff_quasinormal(inp, lam, cfg):
    t = inp["T"]
    qn = is_quasinormal(t, cfg)
    agree = qn == is_fixed_point(t, lam, cfg) == is_normal(t, cfg)
    return 0.0 if agree else 1.0


def _check_square_quasinormal(inp, lam, cfg):
    t = inp["T"]
    if not is_quasinormal(t, cfg):
        return 0.0
    return quasinormality_residual(t @ t)


def _check_nilpotent(inp, lam, cfg):
    t = inp["T"]
    ok = (not is_quasinormal(t, cfg)
          and is_quasinormal(t @ t, cfg)
          and fro(aluthge(t, lam, cfg)) <= cfg.tol_eq
          and not is_fixed_point(t, lam, cfg))
    return 0.0 if ok else 1.0


def _check_rank_one(inp, lam, cfg):
    x, y = inp["x"], inp["y"]
    scale = float(np.linalg.norm(x) * np.linalg.norm(y))
    general = aluthge(outer(x, y), lam, cfg)
    return fro(general - aluthge_rank_one(x, y, lam)) / scale


def _check_orthogonal_kernel(inp, lam, cfg):
    x, y = inp["x"], inp["y"]
    t = outer(x, y)
    scale = float(np.linalg.norm(x) * np.linalg.norm(y))
    return max(fro(aluthge(t, lam, cfg)) / scale, fro(t @ t) / scale**2)


def _check_scalar_detector(inp, lam, cfg):
    r, y = inp["R"], inp["y"]
    n = r.shape[0]
    scalar = fro(r - np.trace(r) / n * np.eye(n)) <= cfg.tol_eq * max(1.0, fro(r))
    witness = commutation_gap(r, y, lam, cfg) > cfg.tol_law
    return 0.0 if witness != scalar else 1.0


def _check_psd_equivalence(inp, lam, cfg):
    t = inp["T"]
    return 0.0 if is_psd(aluthge(t, lam, cfg), cfg) == is_psd(t, cfg) else 1.0


def _check_noninvertible_pair(inp, lam, cfg):
    t = inp["T"]
    return 0.0 if is_psd(aluthge(t, lam, cfg), cfg) and not is_psd(t, cfg) else 1.0


def _check_in_range(inp, lam, cfg):
    t, p = inp["T"], inp["P"]
    return _rel(aluthge(t @ p, lam, cfg) - t, fro(t))


def _check_compression_converse(inp, lam, cfg):
    t, p = inp["T"], inp["P"]
    if _check_in_range(inp, lam, cfg) > cfg.tol_law:
        return 0.0
    support = max(fro(t @ p - t), fro(p @ t - t)) / max(1.0, fro(t))
    return support + quasinormality_residual(t)


def _check_compression_control(inp, lam, cfg):
    return 0.0 if _check_in_range(inp, lam, cfg) > cfg.tol_law else 1.0


CHECKS = {
    "covariance": _check_covariance,
    "spectrum": _check_spectrum,
    "fixed": _check_fixed,
    "fixed_iff_quasinormal": _check_fixed_iff_quasinormal,
    "square_quasinormal": _check_square_quasinormal,
    "nilpotent": _check_nilpotent,
    "rank_one": _check_rank_one,
    "orthogonal_kernel": _check_orthogonal_kernel,
    "scalar_detector": _check_scalar_detector,
    "psd_equivalence": _check_psd_equivalence,
    "noninvertible_pair": _check_noninvertible_pair,
    "in_range": _check_in_range,
    "compression_converse": _check_compression_converse,
    "compression_control": _check_compression_control,
}


def _run(law_id, cases, lam, cfg, seed, notes=(), hypothesis=()):
    """Evaluate cases and aggregate; ties go to the earliest case."""
    worst_res, worst = -1.0, {}
    checks = {}
    for label, check, inputs in cases:
        res = float(CHECKS[check](inputs, lam, cfg))
        checks[check] = max(checks.get(check, 0.0), res)
        if res > worst_res:
            worst_res = res
            worst = {"case": label, "check": check,
                     "inputs": {k: _encode(v) for k, v in inputs.items()}}
    return LawReport(
        law_id=law_id,
        trials=len(cases),
        max_residual=worst_res,
        worst_witness=worst,
        passed=worst_res <= cfg.tol_law,
        seed=int(seed),
        threshold=cfg.tol_law,
        lam=lam,
        checks=checks,
        hypothesis_witnesses=list(hypothesis),
        notes=list(notes),
    )


def replay_witness(report: LawReport, cfg: ToleranceConfig = DEFAULT) -> float:
    w = report.worst_witness
    inputs = {k: _decode(v) for k, v in w["inputs"].items()}
    return float(CHECKS[w["check"]](inputs, report.lam, cfg))


# -- laws ----------------------------------------------------------------------

def law_covariance_and_spectrum(ens: EnsembleSpec, lam: float = 0.5,
                                cfg: ToleranceConfig = DEFAULT) -> LawReport:
    lam = check_lambda(lam)
    cases = []
    for i in range(ens.trials):
        rng = trial_rng(ens.seed, i)
        n = ens.dim(i)
        t, u = gaussian(rng, n), haar_unitary(rng, n)
        cases.append((f"trial:{i}", "covariance", {"T": t, "U": u}))
        cases.append((f"trial:{i}", "spectrum", {"T": t}))
    perm = np.eye(4)[[2, 0, 3, 1]].astype(complex)
    cases.append(("diagonal-permutation", "covariance",
                  {"T": np.diag([1.0, -2.0, 3j, 0.5]).astype(complex), "U": perm}))
    notes = ["spectrum residual is the matched eigenvalue distance over max(1, |T|_2), "
             "scaled so that tol_spectrum maps onto the law threshold",
             "only the eigenvalue spectrum is checked"]
    return _run("covariance_spectrum", cases, lam, cfg, ens.seed, notes)


def law_fixed_points(ens: EnsembleSpec, lam: float = 0.5,
                     cfg: ToleranceConfig = DEFAULT) -> LawReport:
    lam = check_lambda(lam, open_interval=True)
    cases = []
    for i in range(ens.trials):
        rng = trial_rng(ens.seed, i)
        n = ens.dim(i)
        normal = random_normal(rng, n)
        generic = gaussian(rng, n)
        proj = random_projection(rng, n)
        cases.append((f"trial:{i}", "fixed", {"T": normal}))
        cases.append((f"trial:{i}", "fixed", {"T": proj}))
        cases.append((f"trial:{i}", "square_quasinormal", {"T": normal}))
        cases.append((f"trial:{i}:normal", "fixed_iff_quasinormal", {"T": normal}))
        if n > 1:
            cases.append((f"trial:{i}:generic", "fixed_iff_quasinormal", {"T": generic}))
    cases.append(("gallery:nilpotent2", "nilpotent", {"T": gallery_matrix("nilpotent2")}))
    return _run("fixed_points", cases, lam, cfg, ens.seed)


def law_rank_one(ens: EnsembleSpec, lam: float = 0.5,
                 cfg: ToleranceConfig = DEFAULT) -> LawReport:
    lam = check_lambda(lam, open_interval=True)
    cases = []
    for i in range(ens.trials):
        rng = trial_rng(ens.seed, i)
        n = ens.dim(i)
        x, y = gaussian_vector(rng, n), gaussian_vector(rng, n)
        cases.append((f"trial:{i}", "rank_one", {"x": x, "y": y}))
        cases.append((f"trial:{i}:self", "rank_one", {"x": x, "y": x.copy()}))
        if n > 1:
            y_perp = y - np.vdot(x, y) / np.vdot(x, x) * x
            cases.append((f"trial:{i}:orthogonal", "orthogonal_kernel", {"x": x, "y": y_perp}))
    return _run("rank_one", cases, lam, cfg, ens.seed)


def commutation_gap(r, y, lam=0.5, cfg: ToleranceConfig = DEFAULT) -> float:
    """``|Δ(R (y ⊗ y)) - Δ((y ⊗ y) R)|_F / max(1, |R|_F)`` for a unit vector ``y``."""
    p = outer(y, y)
    return _rel(aluthge(r @ p, lam, cfg) - aluthge(p @ r, lam, cfg), fro(r))


def law_scalar_detector(r, lam: float = 0.5, cfg: ToleranceConfig = DEFAULT,
                        candidates: int = 64, seed: int = 0) -> LawReport:
    """Search rank-one projections ``y ⊗ y`` separating ``R`` from the scalars.

    The report passes when a separating ``y`` is found exactly for the
    non-scalar ``R``. Candidates are the standard basis followed by a
    scrambled Halton sequence mapped onto the unit sphere.
    """
    lam = check_lambda(lam, open_interval=True)
    r = as_cmatrix(r)
    n = r.shape[0]
    ys = list(np.eye(n, dtype=complex)) + list(halton_unit_vectors(n, candidates, seed))
    cases = [(f"candidate:{k}", "scalar_detector", {"R": r, "y": y}) for k, y in enumerate(ys)]
    scalar = fro(r - np.trace(r) / n * np.eye(n)) <= cfg.tol_eq * max(1.0, fro(r))
    if scalar:
        return _run("scalar_detector", cases, lam, cfg, seed, ["R is scalar"])
    # one separating vector suffices: report the strongest one
    gaps = [commutation_gap(r, y, lam, cfg) for y in ys]
    best = int(np.argmax(gaps))
    report = _run("scalar_detector", [cases[best]], lam, cfg, seed,
                  ["R is not scalar", f"strongest separation {gaps[best]:.6g}"])
    report.trials = len(cases)
    return report


def _invertible_draw(rng, n, kind, cfg):
    """Draw from one of four invertible families; returns (T, redraws)."""
    redraws = 0
    while True:
        if kind == 0:
            t = random_positive(rng, n)
        elif kind == 1:
            t = gaussian(rng, n)
        elif kind == 2:
            h = gaussian(rng, n)
            h = 0.5 * (h + adj(h))
            w, v = np.linalg.eigh(h)
            rot = (v * np.exp(1j * rng.uniform(0.05, 1.0) * w)) @ adj(v)
            t = random_positive(rng, n) @ rot
        else:
            u = haar_unitary(rng, n)
            d = rng.uniform(0.2, 2.0, n) * rng.choice([-1.0, 1.0], n)
            d[0] = -abs(d[0])
            t = (u * d) @ adj(u)
        s = np.linalg.svd(t, compute_uv=False)
        if s[-1] > 1e3 * cfg.tol_rank * s[0]:
            return t, redraws
        redraws += 1


def law_positivity(ens: EnsembleSpec, lam: float = 0.5,
                   cfg: ToleranceConfig = DEFAULT) -> LawReport:
    lam = check_lambda(lam)
    cases = []
    redraws = 0
    for i in range(ens.trials):
        rng = trial_rng(ens.seed, i)
        t, k = _invertible_draw(rng, ens.dim(i), i % 4, cfg)
        redraws += k
        cases.append((f"trial:{i}", "psd_equivalence", {"T": t}))
        if i % 4 == 0:
            cases.append((f"trial:{i}", "fixed", {"T": t}))
    cases.append(("jordan", "psd_equivalence", {"T": np.array([[1, 1], [0, 1]], dtype=complex)}))
    notes = [f"singular draws redrawn: {redraws}"]
    hypothesis = []
    pair = gallery_matrix("rank_one_positive_pairing")
    if lam > 0:
        cases.append(("gallery:rank_one_positive_pairing", "noninvertible_pair", {"T": pair}))
        delta = aluthge(pair, lam, cfg)
        hypothesis.append({
            "gallery": "rank_one_positive_pairing",
            "T": pair,
            "transform": delta,
            "transform_psd": is_psd(delta, cfg),
            "T_psd": is_psd(pair, cfg),
            "note": "non-invertible T: positive transform does not force positive T",
        })
    else:
        notes.append("lambda = 0 is the identity map; rank-one pairing case skipped")
    return _run("positivity", cases, lam, cfg, ens.seed, notes, hypothesis)


def law_projection_compression(ens: EnsembleSpec, lam: float = 0.5,
                               cfg: ToleranceConfig = DEFAULT) -> LawReport:
    lam = check_lambda(lam, open_interval=True)
    cases = []
    for i in range(ens.trials):
        rng = trial_rng(ens.seed, i)
        n = max(2, ens.dim(i))
        rank = int(rng.integers(1, n))
        basis = haar_unitary(rng, n)[:, :rank]
        p = basis @ adj(basis)
        inner_block = random_normal(rng, rank)
        t = basis @ inner_block @ adj(basis)
        perturbed = t + 1e-3 * gaussian(rng, n)
        generic = gaussian(rng, n)
        cases.append((f"trial:{i}", "in_range", {"T": t, "P": p}))
        cases.append((f"trial:{i}", "compression_converse", {"T": t, "P": p}))
        cases.append((f"trial:{i}:perturbed", "compression_converse", {"T": perturbed, "P": p}))
        cases.append((f"trial:{i}:perturbed", "compression_control", {"T": perturbed, "P": p}))
        cases.append((f"trial:{i}:generic", "compression_converse", {"T": generic, "P": p}))
        cases.append((f"trial:{i}:generic", "compression_control", {"T": generic, "P": p}))
    p = np.diag([1, 1, 0]).astype(complex)
    cases.append(("projection-itself", "in_range", {"T": p, "P": p}))
    cases.append(("identity-vs-proper-projection", "compression_control",
                  {"T": np.eye(3, dtype=complex), "P": p}))
    return _run("projection_compression", cases, lam, cfg, ens.seed)


def scalar_detector_gallery(seed: int) -> list:
    rng = trial_rng(seed, 0, stream=7)
    alpha = complex(*rng.standard_normal(2))
    return [
        ("3I", 3 * np.eye(3, dtype=complex)),
        ("diag(1,2)", np.diag([1, 2]).astype(complex)),
        ("alpha*I", alpha * np.eye(4)),
        ("gaussian4", gaussian(rng, 4)),
        ("nilpotent2", gallery_matrix("nilpotent2")),
    ]


def run_laws(seed: int = 0xA17A, trials: int = 100, lam: float = 0.5,
             cfg: ToleranceConfig = DEFAULT, only=None, dims=(1, 2, 3, 4, 5, 6, 7, 8)) -> list:
    """Run the whole suite (or the law named ``only``) and return reports."""
    if only is not None and only not in LAW_IDS:
        raise ValueError(f"unknown law {only!r}; choose from {', '.join(LAW_IDS)}")
    ens = EnsembleSpec(dims=tuple(dims), trials=trials, seed=seed)
    selected = LAW_IDS if only is None else (only,)
    reports = []
    for law_id in selected:
        if law_id == "scalar_detector":
            for label, r in scalar_detector_gallery(seed):
                rep = law_scalar_detector(r, lam, cfg, seed=seed)
                rep.notes.insert(0, f"R = {label}")
                reports.append(rep)
            continue
        fn = {
            "covariance_spectrum": law_covariance_and_spectrum,
            "fixed_points": law_fixed_points,
            "rank_one": law_rank_one,
            "positivity": law_positivity,
            "projection_compression": law_projection_compression,
        }[law_id]
        reports.append(fn(ens, lam, cfg))
    return reports

"""Analysis of matrix maps against the product-commuting condition.

A map ``Φ`` satisfies the condition at ``lam`` when

    aluthge(Φ(A) Φ(B), lam) == Φ(aluthge(A B, lam))   for all A, B.

For bijective maps in dimension at least 2 this pins ``Φ`` down to a
unitary conjugation ``A -> U A U*``. This module evaluates symbolic map
descriptions, samples the condition, reads off the scalar symbol ``h``
with ``Φ(αI) = h(α) I`` and rebuilds ``U`` from the images of matrix units.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ensembles import EnsembleSpec, gaussian, haar_unitary, random_normal, trial_rng, unit_vector
from .errors import (
    ConditionViolated,
    DimensionMismatch,
    MalformedDocument,
    NonUnitaryCarrier,
    NonUnitaryResult,
    NotAProjectionImage,
    NotRankOneImage,
    NotScalarValued,
)
from .laws import LawReport
from .matcore import DEFAULT, ToleranceConfig, adj, as_cmatrix, fro, numerical_rank, outer
from .oppred import is_orthogonal_projection, projection_relations
from .serialize import complex_from_doc, complex_to_doc, matrix_from_doc, matrix_to_doc
from .transform import aluthge, check_lambda

SATISFIED = "Satisfied"
VIOLATED = "Violated"
DIMENSION_ONE = "DimensionOne"

PHASE_NOTE = "global phase of U_hat is unconstrained; conjugation does not see it"
SAME_SPACE_NOTE = "domain and codomain are both C^n (a bijective conjugation forces equal dimension)"


# -- map descriptions ------------------------------------------------------------

def _unitary_carrier(u, cfg=DEFAULT):
    u = as_cmatrix(u)
    n = u.shape[0]
    if fro(adj(u) @ u - np.eye(n)) > cfg.tol_eq * max(1.0, np.sqrt(n)):
        raise NonUnitaryCarrier("carrier matrix is not unitary within tol_eq")
    return u


@dataclass(frozen=True, eq=False)
class Conjugation:
    """``A -> U A U*``."""

    unitary: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "unitary", _unitary_carrier(self.unitary))

    @property
    def n(self):
        return self.unitary.shape[0]


@dataclass(frozen=True, eq=False)
class AntiConjugation:
    """``A -> U A* U*``."""

    unitary: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "unitary", _unitary_carrier(self.unitary))

    @property
    def n(self):
        return self.unitary.shape[0]


@dataclass(frozen=True, eq=False)
class Scale:
    factor: complex
    inner: object

    def __post_init__(self):
        object.__setattr__(self, "factor", complex(self.factor))
        if not np.isfinite(self.factor):
            raise ValueError("scale factor must be finite")

    @property
    def n(self):
        return self.inner.n


@dataclass(frozen=True, eq=False)
class Compose:
    """``A -> outer(inner(A))``."""

    outer: object
    inner: object

    def __post_init__(self):
        a, b = self.outer.n, self.inner.n
        if a is not None and b is not None and a != b:
            raise DimensionMismatch(f"cannot compose maps on C^{a} and C^{b}")

    @property
    def n(self):
        return self.outer.n if self.outer.n is not None else self.inner.n


@dataclass(frozen=True, eq=False)
class ScalarReciprocal:
    """``z -> 1/z`` with ``0 -> 0`` on 1x1 matrices."""

    @property
    def n(self):
        return 1


@dataclass(frozen=True, eq=False)
class OracleMap:
    """Black-box map given as a Python callable.

    Results obtained through an oracle are sampled evidence only.
    """

    func: Callable
    dim: int
    label: str = "oracle"

    @property
    def n(self):
        return self.dim


MAP_TYPES = (Conjugation, AntiConjugation, Scale, Compose, ScalarReciprocal, OracleMap)


def is_symbolic(desc) -> bool:
    if isinstance(desc, OracleMap):
        return False
    if isinstance(desc, Scale):
        return is_symbolic(desc.inner)
    if isinstance(desc, Compose):
        return is_symbolic(desc.outer) and is_symbolic(desc.inner)
    return True


def eval_map(desc, a) -> np.ndarray:
    a = as_cmatrix(a)
    n = desc.n
    if n is not None and a.shape[0] != n:
        raise DimensionMismatch(f"map acts on {n}x{n} matrices, got {a.shape[0]}x{a.shape[0]}")
    if isinstance(desc, Conjugation):
        u = desc.unitary
        return u @ a @ adj(u)
    if isinstance(desc, AntiConjugation):
        u = desc.unitary
        return u @ adj(a) @ adj(u)
    if isinstance(desc, Scale):
        return desc.factor * eval_map(desc.inner, a)
    if isinstance(desc, Compose):
        return eval_map(desc.outer, eval_map(desc.inner, a))
    if isinstance(desc, ScalarReciprocal):
        z = a[0, 0]
        return np.array([[0.0 if z == 0 else 1.0 / z]], dtype=np.complex128)
    if isinstance(desc, OracleMap):
        return as_cmatrix(desc.func(a))
    raise TypeError(f"not a map description: {desc!r}")


def map_to_doc(desc) -> dict:
    if isinstance(desc, Conjugation):
        return {"kind": "conjugation", "unitary": matrix_to_doc(desc.unitary)}
    if isinstance(desc, AntiConjugation):
        return {"kind": "anti_conjugation", "unitary": matrix_to_doc(desc.unitary)}
    if isinstance(desc, Scale):
        return {"kind": "scale", "factor": complex_to_doc(desc.factor), "inner": map_to_doc(desc.inner)}
    if isinstance(desc, Compose):
        return {"kind": "compose", "outer": map_to_doc(desc.outer), "inner": map_to_doc(desc.inner)}
    if isinstance(desc, ScalarReciprocal):
        return {"kind": "scalar_reciprocal"}
    raise TypeError(f"{type(desc).__name__} has no file representation")


def map_from_doc(doc, path="$"):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise MalformedDocument("map document must be an object with a 'kind'", path)
    kind = doc["kind"]
    try:
        if kind == "conjugation":
            return Conjugation(matrix_from_doc(doc.get("unitary"), f"{path}.unitary"))
        if kind == "anti_conjugation":
            return AntiConjugation(matrix_from_doc(doc.get("unitary"), f"{path}.unitary"))
        if kind == "scale":
            return Scale(complex_from_doc(doc.get("factor"), f"{path}.factor"),
                         map_from_doc(doc.get("inner"), f"{path}.inner"))
        if kind == "compose":
            return Compose(map_from_doc(doc.get("outer"), f"{path}.outer"),
                           map_from_doc(doc.get("inner"), f"{path}.inner"))
        if kind == "scalar_reciprocal":
            return ScalarReciprocal()
    except (NonUnitaryCarrier, DimensionMismatch) as exc:
        raise MalformedDocument(str(exc), path) from exc
    raise MalformedDocument(f"unknown map kind {kind!r}", f"{path}.kind")


# -- condition check --------------------------------------------------------------

@dataclass
class ConditionReport:
    trials: int
    lam: float
    max_residual: float
    worst_pair: dict
    verdict: str
    threshold: float
    violation_margin: float
    clear_violation: bool
    evidence: str
    notes: list = field(default_factory=list)


def condition_residual(desc, a, b, lam, cfg=DEFAULT) -> float:
    lhs = aluthge(eval_map(desc, a) @ eval_map(desc, b), lam, cfg)
    rhs = eval_map(desc, aluthge(a @ b, lam, cfg))
    return fro(lhs - rhs) / max(1.0, fro(a) * fro(b))


def sample_pairs(n: int, trials: int, seed: int):
    """Targeted pairs first, then a rotation through four random families.

    The targeted pairs are ``(I, I)`` and ``(e1 ⊗ z, I)`` with ``z`` the
    normalized ``e1 + e2``, the rank-one pair whose transform separates
    ``A -> A*`` from the identity action.
    """
    eye = np.eye(n, dtype=complex)
    out = [("identity", eye, eye)]
    if n >= 2:
        e1 = eye[0]
        z = (eye[0] + eye[1]) / np.sqrt(2)
        out.append(("rank_one_e1_z", outer(e1, z), eye))
        out.append(("projections_e1_z", outer(e1, e1), outer(z, z)))
    i = 0
    while len(out) < trials:
        rng = trial_rng(seed, i)
        kind = i % 4
        if kind == 0:
            out.append((f"gaussian:{i}", gaussian(rng, n), gaussian(rng, n)))
        elif kind == 1:
            x, y = unit_vector(rng, n), unit_vector(rng, n)
            out.append((f"rank_one_projections:{i}", outer(x, x), outer(y, y)))
        elif kind == 2:
            x, y = unit_vector(rng, n), unit_vector(rng, n)
            out.append((f"rank_one:{i}", outer(x, y), eye))
        else:
            x = unit_vector(rng, n)
            out.append((f"gaussian_projection:{i}", gaussian(rng, n), outer(x, x)))
        i += 1
    return out[:trials]


def check_condition(desc, lam: float = 0.5, sampler: EnsembleSpec | None = None,
                    cfg: ToleranceConfig = DEFAULT) -> ConditionReport:
    """Sample the product-commuting condition for ``desc``.

    Only ``sampler.trials`` and ``sampler.seed`` are used; the dimension is
    the map's own.
    """
    lam = check_lambda(lam, open_interval=True)
    sampler = sampler or EnsembleSpec(trials=200)
    n = desc.n
    if n is None:
        raise DimensionMismatch("map dimension is undetermined")
    worst_res, worst = -1.0, {}
    pairs = sample_pairs(n, sampler.trials, sampler.seed)
    for label, a, b in pairs:
        res = condition_residual(desc, a, b, lam, cfg)
        if res > worst_res:
            worst_res, worst = res, {"case": label, "A": a, "B": b}
    if worst_res > cfg.tol_law:
        verdict = VIOLATED
    elif n == 1:
        verdict = DIMENSION_ONE
    else:
        verdict = SATISFIED
    notes = [SAME_SPACE_NOTE, f"rejection margin {cfg.violation_margin:g} is an artifact constant"]
    if n == 1:
        notes.append("dimension one: the conjugation characterization does not apply")
    return ConditionReport(
        trials=len(pairs),
        lam=lam,
        max_residual=worst_res,
        worst_pair=worst,
        verdict=verdict,
        threshold=cfg.tol_law,
        violation_margin=cfg.violation_margin,
        clear_violation=worst_res >= cfg.violation_margin,
        evidence="symbolic" if is_symbolic(desc) else "sampled evidence only",
        notes=notes,
    )


# -- scalar symbol -----------------------------------------------------------------

@dataclass
class ScalarSymbolTable:
    samples: list
    classification: str
    additivity_residual: float
    multiplicativity_residual: float
    oddness_residual: float
    zero_residual: float
    unit_residual: float


def scalar_image(desc, alpha: complex, cfg: ToleranceConfig = DEFAULT) -> complex:
    """``h(alpha)`` read off ``Φ(alpha I)``; raises if the image is not scalar."""
    n = desc.n
    m = eval_map(desc, alpha * np.eye(n, dtype=complex))
    h = np.trace(m) / n
    if fro(m - h * np.eye(n)) > cfg.tol_eq * max(1.0, fro(m)):
        raise NotScalarValued(f"Φ({alpha}·I) is not a scalar matrix")
    return complex(h)


def default_alpha_grid(seed: int = 0xA17A) -> list:
    rng = trial_rng(seed, 0, stream=11)
    grid = [0j, 1 + 0j, -1 + 0j, 1j]
    radii = np.sqrt(rng.uniform(0, 1, 6))
    grid += list(radii * np.exp(2j * np.pi * rng.uniform(0, 1, 6)))
    grid += list(10 * np.exp(2j * np.pi * rng.uniform(0, 1, 3)))
    return [complex(a) for a in grid]


def extract_h(desc, alphas=None, cfg: ToleranceConfig = DEFAULT) -> ScalarSymbolTable:
    alphas = default_alpha_grid() if alphas is None else [complex(a) for a in alphas]
    h = {a: scalar_image(desc, a, cfg) for a in alphas}

    def hval(z):
        if z not in h:
            h[z] = scalar_image(desc, z, cfg)
        return h[z]

    mult = add = odd = 0.0
    for a in alphas:
        odd = max(odd, abs(hval(-a) + hval(a)))
        for b in alphas:
            mult = max(mult, abs(hval(a * b) - hval(a) * hval(b)))
            add = max(add, abs(hval(a + b) - hval(a) - hval(b)))
    samples = [(a, h[a]) for a in alphas]
    tol = cfg.tol_law
    if all(abs(v - a) <= tol * max(1.0, abs(a)) for a, v in samples):
        cls = "Identity"
    elif all(abs(v - a.conjugate()) <= tol * max(1.0, abs(a)) for a, v in samples):
        cls = "Conjugation"
    else:
        cls = "Other"
    return ScalarSymbolTable(
        samples=samples,
        classification=cls,
        additivity_residual=add,
        multiplicativity_residual=mult,
        oddness_residual=odd,
        zero_residual=abs(hval(0j)),
        unit_residual=abs(hval(1 + 0j) - 1),
    )


# -- structure preservation ------------------------------------------------------

def _orthonormal_pair(rng, n):
    x = unit_vector(rng, n)
    y = unit_vector(rng, n)
    y = y - np.vdot(x, y) * x
    return x, y / np.linalg.norm(y)


def _top_vector(m):
    _, vecs = np.linalg.eigh(0.5 * (m + adj(m)))
    return vecs[:, -1]


def verify_structure_preservation(desc, lam: float = 0.5, n: int | None = None, trials: int = 50,
                                  cfg: ToleranceConfig = DEFAULT, seed: int = 0xA17A) -> LawReport:
    """Check the consequences of the condition on projections and rank-one maps.

    Per trial, with orthonormal ``x, x'``, ``P = x ⊗ x``, ``Q = x' ⊗ x'`` and
    ``R = z ⊗ z`` for the normalized ``z = x + x'``: the images commute with
    the transform, square normals correctly, map projections to rank-one
    projections, keep ``P ⊥ Q`` and ``Q ≤ P + Q`` (and do not create
    orthogonality or order for ``P, R``), are additive on ``P + Q``, satisfy
    ``Φ(αP + βQ) = h(α)Φ(P) + h(β)Φ(Q)`` and
    ``<Φ(A)y, y> = h(<Ax, x>)`` where ``Φ(x ⊗ x) = y ⊗ y``.
    """
    lam = check_lambda(lam, open_interval=True)
    n = desc.n if n is None else n
    if desc.n is not None and n != desc.n:
        raise DimensionMismatch(f"map acts on C^{desc.n}, requested n={n}")
    if n < 2:
        raise ValueError("structure preservation needs n >= 2")
    cond = check_condition(desc, lam, EnsembleSpec(trials=100, seed=seed), cfg)
    if cond.verdict != SATISFIED:
        raise ConditionViolated(f"map does not satisfy the condition (residual {cond.max_residual:.3e})")

    phi = lambda a: eval_map(desc, a)  # noqa: E731
    h = lambda a: scalar_image(desc, a, cfg)  # noqa: E731
    results = []

    def record(label, check, res, **inputs):
        results.append((float(res), label, check, inputs))

    for i in range(trials):
        rng = trial_rng(seed, i, stream=3)
        x, xp = _orthonormal_pair(rng, n)
        z = (x + xp) / np.sqrt(2)
        p, q, r = outer(x, x), outer(xp, xp), outer(z, z)
        a = gaussian(rng, n)
        nrm = random_normal(rng, n)
        alpha, beta = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        if i % 5 == 0:
            alpha = 0j
        elif i % 5 == 1:
            beta = 0j
        lbl = f"trial:{i}"

        fp, fq, fr, fpq = phi(p), phi(q), phi(r), phi(p + q)
        for name, img in (("P", fp), ("Q", fq), ("R", fr), ("P+Q", fpq)):
            if not is_orthogonal_projection(img, cfg):
                raise NotAProjectionImage(f"{lbl}: image of {name} is not an orthogonal projection")

        record(lbl, "commutes_with_transform",
               fro(aluthge(phi(a), lam, cfg) - phi(aluthge(a, lam, cfg))) / max(1.0, fro(a)), A=a)
        record(lbl, "square_of_normal",
               fro(phi(nrm @ nrm) - phi(nrm) @ phi(nrm)) / max(1.0, fro(nrm) ** 2), N=nrm)
        record(lbl, "rank_one_image", 0.0 if numerical_rank(fp, cfg) == 1 else 1.0, P=p)
        record(lbl, "orthogonality", fro(fp @ fq) + fro(fq @ fp), P=p, Q=q)
        rel_pr = projection_relations(fp, fr, cfg)
        record(lbl, "no_spurious_orthogonality", 1.0 if rel_pr["orthogonal"] else 0.0, P=p, R=r)
        record(lbl, "order", max(fro(fq @ fpq - fq), fro(fpq @ fq - fq)), Q=q, P=p + q)
        record(lbl, "no_spurious_order", 1.0 if rel_pr["leq"] or rel_pr["geq"] else 0.0, P=p, R=r)
        record(lbl, "additivity", fro(fpq - fp - fq), P=p, Q=q)
        lhs = phi(alpha * p + beta * q)
        record(lbl, "two_projection",
               fro(lhs - h(alpha) * fp - h(beta) * fq) / max(1.0, abs(alpha), abs(beta)),
               P=p, Q=q, alpha=alpha, beta=beta)
        y = _top_vector(fp)
        step1 = abs(np.vdot(y, phi(a) @ y) - h(complex(np.vdot(x, a @ x))))
        record(lbl, "rank_one_compression", step1 / max(1.0, fro(a)), A=a, x=x)

    checks = {}
    worst = max(results, key=lambda r: r[0])
    for res, _, check, _ in results:
        checks[check] = max(checks.get(check, 0.0), res)
    res, label, check, inputs = worst
    return LawReport(
        law_id="structure_preservation",
        trials=trials,
        max_residual=res,
        worst_witness={"case": label, "check": check, "inputs": inputs},
        passed=res <= cfg.tol_law,
        seed=seed,
        threshold=cfg.tol_law,
        lam=lam,
        checks=checks,
        notes=["sampled evidence only"] if not is_symbolic(desc) else [],
    )


# -- unitary extraction --------------------------------------------------------------

@dataclass
class ExtractionResult:
    U_hat: np.ndarray
    unitarity_residual: float
    conjugation_residual: float
    validation_samples: int
    phase_note: str = PHASE_NOTE


def extract_unitary(desc, n: int | None = None, cfg: ToleranceConfig = DEFAULT,
                    seed: int = 0xA17A, lam: float = 0.5, validation: int = 50) -> ExtractionResult:
    """Rebuild ``U`` with ``Φ(A) = U A U*`` from the images of matrix units.

    The image of ``E11 = e1 ⊗ e1`` is ``(U e1) ⊗ (U e1)``; a unit vector
    ``u1`` spanning its range fixes ``U e1`` up to a phase. Then
    ``Φ(e_j ⊗ e1) u1`` recovers ``U e_j`` with that same phase.
    """
    n = desc.n if n is None else n
    if desc.n is not None and n != desc.n:
        raise DimensionMismatch(f"map acts on C^{desc.n}, requested n={n}")
    if n < 2:
        raise ConditionViolated("dimension one: no conjugating unitary is implied")
    cond = check_condition(desc, lam, EnsembleSpec(trials=100, seed=seed), cfg)
    if cond.verdict != SATISFIED:
        raise ConditionViolated(
            f"condition check returned {cond.verdict} (residual {cond.max_residual:.3e})")
    table = extract_h(desc, cfg=cfg)
    if table.classification != "Identity":
        raise ConditionViolated(f"scalar symbol classified as {table.classification}")

    eye = np.eye(n, dtype=complex)
    img = eval_map(desc, outer(eye[0], eye[0]))
    if not is_orthogonal_projection(img, cfg) or numerical_rank(img, cfg) != 1:
        raise NotRankOneImage("image of e1 ⊗ e1 is not a rank-one orthogonal projection")
    u1 = _top_vector(img)
    cols = [u1] + [eval_map(desc, outer(eye[j], eye[0])) @ u1 for j in range(1, n)]
    u_hat = np.column_stack(cols)

    unit_res = fro(adj(u_hat) @ u_hat - eye)
    conj_res = 0.0
    for k in range(validation):
        a = gaussian(trial_rng(seed, k, stream=5), n)
        conj_res = max(conj_res, fro(eval_map(desc, a) - u_hat @ a @ adj(u_hat)) / max(1.0, fro(a)))
    result = ExtractionResult(u_hat, unit_res, conj_res, validation)
    if unit_res > cfg.tol_law or conj_res > cfg.tol_law:
        raise NonUnitaryResult(
            f"validation failed: unitarity {unit_res:.3e}, conjugation {conj_res:.3e}", result)
    return result


def haar_conjugation(n: int, seed: int) -> Conjugation:
    """Convenience: conjugation by a seeded Haar-random unitary."""
    return Conjugation(haar_unitary(trial_rng(seed, 0, stream=9), n))

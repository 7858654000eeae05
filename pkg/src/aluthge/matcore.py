"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` and shape
``(n, n)``. :func:`as_cmatrix` is the single entry point that validates
inputs; everything downstream assumes a validated square finite array.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonFinite, NonHermitian, NotPSD

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used throughout the package.

    Attributes
    ----------
    tol_rank : float
        Relative singular-value cutoff. The effective cutoff is
        ``max(tol_rank, n * eps) * sigma_max``.
    tol_eq : float
        Relative Frobenius tolerance for matrix equalities.
    tol_psd : float
        Allowed negativity of eigenvalues, relative to the spectral norm.
    tol_law : float
        Pass threshold of the law suites and the condition checker.
    tol_spectrum : float
        Eigenvalue multiset matching tolerance, relative to ``max(1, |T|_2)``.
    violation_margin : float
        Residual a map must reach before it is reported as clearly rejected.
    """

    tol_rank: float = 1e-10
    tol_eq: float = 1e-9
    tol_psd: float = 1e-9
    tol_law: float = 1e-7
    tol_spectrum: float = 1e-6
    violation_margin: float = 0.1

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")

    def as_dict(self):
        return dict(self.__dict__)


DEFAULT = ToleranceConfig()


def as_cmatrix(a) -> np.ndarray:
    """Validate and convert ``a`` to a square finite complex128 array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix has NaN or infinite entries")
    return m


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise NonFinite("vector has NaN or infinite entries")
    return v


def adj(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def fro(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def spec_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def outer(x, y) -> np.ndarray:
    """Rank-one operator ``x ⊗ y`` acting as ``u -> <u, y> x``."""
    return np.outer(as_vector(x), as_vector(y).conj())


def inner(u, v) -> complex:
    """``<u, v>``, linear in the first argument."""
    return complex(np.vdot(v, u))


def rank_cutoff(sigma_max: float, n: int, cfg: ToleranceConfig = DEFAULT) -> float:
    return max(cfg.tol_rank, n * EPS) * sigma_max


def numerical_rank(a: np.ndarray, cfg: ToleranceConfig = DEFAULT) -> int:
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rank_cutoff(s[0], a.shape[0], cfg)))


def herm_eig(a, cfg: ToleranceConfig = DEFAULT):
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns
    are the matching eigenvectors. The input is symmetrized as
    ``(A + A*) / 2`` before factoring.
    """
    a = as_cmatrix(a)
    if fro(a - adj(a)) > cfg.tol_eq * fro(a):
        raise NonHermitian("matrix is not Hermitian within tol_eq")
    values, vectors = np.linalg.eigh(0.5 * (a + adj(a)))
    return values, vectors


def _power_from_eig(values, vectors, gamma, cutoff):
    kept = values > cutoff
    powered = np.zeros_like(values)
    if gamma == 0:
        powered[kept] = 1.0
    else:
        powered[kept] = values[kept] ** gamma
    return (vectors * powered) @ adj(vectors)


def psd_power(p, gamma: float, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Fractional power of a Hermitian positive semidefinite matrix.

    Eigenvalues at or below the rank cutoff are treated as zero, so
    ``gamma == 0`` yields the orthogonal projection onto the range of ``p``.
    """
    if gamma < 0 or not np.isfinite(gamma):
        raise ValueError(f"gamma must be finite and >= 0, got {gamma!r}")
    p = as_cmatrix(p)
    values, vectors = herm_eig(p, cfg)
    top = float(np.max(np.abs(values)))
    if values[0] < -cfg.tol_psd * top:
        raise NotPSD(f"smallest eigenvalue {values[0]:.3e} is negative beyond tol_psd")
    return _power_from_eig(values, vectors, gamma, rank_cutoff(top, p.shape[0], cfg))


@dataclass(frozen=True)
class PolarResult:
    """Canonical polar factors ``T = V P``.

    ``V`` is a partial isometry vanishing on the numerical null space of
    ``T`` and ``P = |T|``. The right singular vectors and truncated singular
    values are kept so that powers of ``P`` can be formed without
    refactoring.
    """

    V: np.ndarray
    P: np.ndarray
    rank: int
    cutoff: float
    singular_values: np.ndarray = field(repr=False)
    right_vectors: np.ndarray = field(repr=False)

    def power(self, gamma: float) -> np.ndarray:
        """``|T| ** gamma`` with ``0 ** 0 == 0`` (range projection at ``gamma=0``)."""
        s = self.singular_values
        return _power_from_eig(s, self.right_vectors, gamma, self.cutoff)


def polar(t, cfg: ToleranceConfig = DEFAULT) -> PolarResult:
    """Canonical polar decomposition via the SVD ``T = W S X*``.

    ``P = X S X*`` and ``V`` is the sum of ``w_i x_i*`` over singular values
    above the rank cutoff.
    """
    t = as_cmatrix(t)
    n = t.shape[0]
    w, s, xh = np.linalg.svd(t)
    x = adj(xh)
    cutoff = rank_cutoff(s[0], n, cfg)
    kept = s > cutoff
    r = int(np.sum(kept))
    v = w[:, kept] @ xh[kept, :]
    p = (x * s) @ xh
    p = 0.5 * (p + adj(p))
    return PolarResult(V=v, P=p, rank=r, cutoff=cutoff, singular_values=s, right_vectors=x)


def is_hermitian(a, cfg: ToleranceConfig = DEFAULT) -> bool:
    a = as_cmatrix(a)
    return fro(a - adj(a)) <= cfg.tol_eq * max(1.0, fro(a))


def is_psd(a, cfg: ToleranceConfig = DEFAULT) -> bool:
    a = as_cmatrix(a)
    if not is_hermitian(a, cfg):
        return False
    lo = np.linalg.eigvalsh(0.5 * (a + adj(a)))[0]
    return bool(lo >= -cfg.tol_psd * max(1.0, spec_norm(a)))

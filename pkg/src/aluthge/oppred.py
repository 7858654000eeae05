"""Operator predicates, eigenvalue multisets and the numerical range."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionMismatch, NotAProjection
from .matcore import DEFAULT, ToleranceConfig, adj, as_cmatrix, fro
from .transform import fixed_point_residual


def normality_residual(t) -> float:
    t = as_cmatrix(t)
    return fro(adj(t) @ t - t @ adj(t)) / max(1.0, fro(t) ** 2)


def quasinormality_residual(t) -> float:
    """Relative norm of the commutator ``[T, T*T]``."""
    t = as_cmatrix(t)
    tt = adj(t) @ t
    return fro(t @ tt - tt @ t) / max(1.0, fro(t) ** 3)


def is_normal(t, cfg: ToleranceConfig = DEFAULT) -> bool:
    return normality_residual(t) <= cfg.tol_eq


def is_quasinormal(t, cfg: ToleranceConfig = DEFAULT) -> bool:
    return quasinormality_residual(t) <= cfg.tol_eq


def is_fixed_point(t, lam: float = 0.5, cfg: ToleranceConfig = DEFAULT) -> bool:
    return fixed_point_residual(t, lam, cfg) <= cfg.tol_eq


def is_partial_isometry(t, cfg: ToleranceConfig = DEFAULT) -> bool:
    t = as_cmatrix(t)
    g = adj(t) @ t
    return fro(g @ g - g) <= cfg.tol_eq and fro(adj(g) - g) <= cfg.tol_eq


def is_orthogonal_projection(p, cfg: ToleranceConfig = DEFAULT) -> bool:
    p = as_cmatrix(p)
    return fro(p @ p - p) <= cfg.tol_eq and fro(adj(p) - p) <= cfg.tol_eq


def projection_relations(p, q, cfg: ToleranceConfig = DEFAULT) -> dict:
    """Orthogonality and order between two orthogonal projections.

    ``leq`` means ``PQ = QP = P`` and ``geq`` means ``PQ = QP = Q``.
    """
    p, q = as_cmatrix(p), as_cmatrix(q)
    if p.shape != q.shape:
        raise DimensionMismatch(f"shapes {p.shape} and {q.shape} differ")
    for name, m in (("P", p), ("Q", q)):
        if not is_orthogonal_projection(m, cfg):
            raise NotAProjection(f"{name} is not an orthogonal projection")
    pq, qp = p @ q, q @ p
    tol = cfg.tol_eq
    return {
        "orthogonal": fro(pq) <= tol and fro(qp) <= tol,
        "leq": fro(pq - p) <= tol and fro(qp - p) <= tol,
        "geq": fro(pq - q) <= tol and fro(qp - q) <= tol,
    }


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)


def spectrum(t, cfg: ToleranceConfig = DEFAULT) -> SpectrumResult:
    t = as_cmatrix(t)
    return SpectrumResult(np.linalg.eigvals(t))


def bottleneck_distance(a, b) -> float:
    """Smallest achievable maximum distance over pairings of two multisets.

    Candidate thresholds are the distinct pairwise distances; feasibility of
    a threshold is a perfect matching test on the bipartite graph of pairs
    within it.
    """
    a = np.asarray(getattr(a, "eigenvalues", a), dtype=complex)
    b = np.asarray(getattr(b, "eigenvalues", b), dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"multisets of sizes {a.size} and {b.size}")
    if a.size == 0:
        return 0.0
    dist = np.abs(a[:, None] - b[None, :])
    levels = np.unique(dist)
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        blocked = (dist > levels[mid]).astype(float)
        rows, cols = linear_sum_assignment(blocked)
        if blocked[rows, cols].sum() == 0:
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])


def spectra_match(a: SpectrumResult, b: SpectrumResult, tol: float) -> bool:
    return bottleneck_distance(a, b) <= tol


@dataclass(frozen=True)
class NumericalRangePolygon:
    """Inner polygonal approximation of the numerical range.

    ``boundary_points[k]`` maximizes ``Re(exp(-i theta_k) z)`` over the
    numerical range, so the points are ordered counter-clockwise.
    """

    support_angles: np.ndarray
    boundary_points: np.ndarray
    is_convex: bool

    def distance(self, z: complex) -> float:
        """Euclidean distance from ``z`` to the polygon (0 inside)."""
        pts = _distinct_cyclic(self.boundary_points)
        if len(pts) == 1:
            return abs(z - pts[0])
        nxt = np.roll(pts, -1)
        edges = nxt - pts
        if len(pts) >= 3:
            cross = (edges.conj() * (z - pts)).imag
            if np.all(cross >= 0):
                return 0.0
        best = np.inf
        for p0, e in zip(pts, edges):
            s = np.clip(((z - p0) * np.conj(e)).real / max(abs(e) ** 2, 1e-300), 0.0, 1.0)
            best = min(best, abs(z - (p0 + s * e)))
        return float(best)

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        return self.distance(z) <= tol


def _distinct_cyclic(points, tol=1e-12):
    scale = max(1.0, float(np.max(np.abs(points))))
    out = [points[0]]
    for p in points[1:]:
        if abs(p - out[-1]) > tol * scale:
            out.append(p)
    while len(out) > 1 and abs(out[-1] - out[0]) <= tol * scale:
        out.pop()
    return np.array(out)


def _convex(points, tol=1e-9) -> bool:
    pts = _distinct_cyclic(points)
    if len(pts) < 3:
        return True
    scale = max(1.0, float(np.max(np.abs(pts)))) ** 2
    e1 = np.roll(pts, -1) - pts
    e2 = np.roll(e1, -1)
    return bool(np.all((e1.conj() * e2).imag >= -tol * scale))


def _support_points(t, angles):
    rotated = np.exp(-1j * angles)[:, None, None] * t[None, :, :]
    herm = 0.5 * (rotated + np.conj(np.swapaxes(rotated, 1, 2)))
    _, vecs = np.linalg.eigh(herm)
    v = vecs[:, :, -1]
    return np.einsum("ki,ij,kj->k", v.conj(), t, v)


def _outer_gaps(angles, points):
    """Distance from each outer vertex to the matching inner edge.

    Adjacent support lines ``Re(exp(-i theta) z) = h`` meet at an outer
    vertex; the ear between it and the chord of the two support points
    bounds how far the true boundary can stray from the polygon.
    """
    a0, a1 = angles, np.append(angles[1:], angles[0] + 2 * np.pi)
    p0, p1 = points, np.roll(points, -1)
    h0 = (np.exp(-1j * a0) * p0).real
    h1 = (np.exp(-1j * a1) * p1).real
    det = np.sin(a1 - a0)
    safe = np.where(np.abs(det) > 1e-15, det, 1.0)
    x = (h0 * np.sin(a1) - h1 * np.sin(a0)) / safe
    y = (h1 * np.cos(a0) - h0 * np.cos(a1)) / safe
    q = x + 1j * y
    edge = p1 - p0
    s = np.clip(((q - p0) * edge.conj()).real / np.maximum(np.abs(edge) ** 2, 1e-300), 0, 1)
    gap = np.abs(q - (p0 + s * edge))
    return np.where(np.abs(det) > 1e-15, gap, np.abs(edge))


def numerical_range(t, m: int = 360, cfg: ToleranceConfig = DEFAULT,
                    refine_tol: float | None = None, max_rounds: int = 40) -> NumericalRangePolygon:
    """Support-function polygon inscribed in the numerical range.

    Starts from ``m`` equally spaced directions. Intervals whose outer ear is
    wider than ``refine_tol`` (default ``tol_spectrum * max(1, |T|_2)``) are
    bisected, so every point of the numerical range, eigenvalues included,
    lies within ``refine_tol`` of the polygon. ``refine_tol=0`` disables
    refinement.
    """
    if m < 8:
        raise ValueError("at least 8 support angles are required")
    t = as_cmatrix(t)
    if refine_tol is None:
        refine_tol = cfg.tol_spectrum * max(1.0, float(np.linalg.norm(t, 2)))
    angles = 2 * np.pi * np.arange(m) / m
    points = _support_points(t, angles)
    for _ in range(max_rounds if refine_tol > 0 else 0):
        bad = np.nonzero(_outer_gaps(angles, points) > refine_tol)[0]
        if bad.size == 0:
            break
        nxt = np.append(angles[1:], angles[0] + 2 * np.pi)
        mids = 0.5 * (angles[bad] + nxt[bad])
        angles = np.concatenate([angles, mids])
        points = np.concatenate([points, _support_points(t, mids)])
        order = np.argsort(angles)
        angles, points = angles[order], points[order]
    return NumericalRangePolygon(angles, points, _convex(points))

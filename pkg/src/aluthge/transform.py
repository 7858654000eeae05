"""The lambda-Aluthge transform, its Duggal endpoint and iteration."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroVector
from .matcore import DEFAULT, ToleranceConfig, as_cmatrix, as_vector, fro, inner, outer, polar


def check_lambda(lam: float, open_interval: bool = False) -> float:
    lam = float(lam)
    if open_interval:
        if not 0.0 < lam < 1.0:
            raise ValueError(f"lambda must lie in (0, 1), got {lam!r}")
    elif not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    return lam


def aluthge(t, lam: float = 0.5, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Compute ``|T|^lam V |T|^(1-lam)`` from the canonical polar factors.

    At the endpoints the zero exponent is read as the identity, so
    ``aluthge(T, 0) == V|T| == T`` and ``aluthge(T, 1) == |T|V``.
    """
    lam = check_lambda(lam)
    t = as_cmatrix(t)
    pol = polar(t, cfg)
    if lam == 0.0:
        return pol.V @ pol.P
    if lam == 1.0:
        return pol.P @ pol.V
    return pol.power(lam) @ pol.V @ pol.power(1.0 - lam)


def duggal(t, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    return aluthge(t, 1.0, cfg)


def aluthge_rank_one(x, y, lam: float = 0.5) -> np.ndarray:
    """Closed form ``<x, y> / |y|^2 (y ⊗ y)`` for the transform of ``x ⊗ y``.

    The value does not depend on ``lam``; it is only validated.
    """
    check_lambda(lam, open_interval=True)
    x, y = as_vector(x), as_vector(y)
    ny = float(np.linalg.norm(y))
    if np.linalg.norm(x) <= 0 or ny <= 0:
        raise ZeroVector("both vectors must be nonzero")
    return inner(x, y) / ny**2 * outer(y, y)


def fixed_point_residual(t, lam: float = 0.5, cfg: ToleranceConfig = DEFAULT) -> float:
    """``|aluthge(T) - T|_F / max(1, |T|_F)``."""
    t = as_cmatrix(t)
    return fro(aluthge(t, lam, cfg) - t) / max(1.0, fro(t))


@dataclass
class IterationTrace:
    """Iterates ``T_0, T_1, ...`` with ``T_{k+1} = aluthge(T_k)``.

    ``iterates`` holds ``steps + 1`` matrices (the input first) and
    ``residuals[k]`` is the relative fixed-point residual of ``T_k``.
    """

    iterates: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    converged: bool = False
    steps: int = 0


def aluthge_iterate(t, lam: float = 0.5, max_steps: int = 50, stop_tol: float = 1e-12,
                    cfg: ToleranceConfig = DEFAULT) -> IterationTrace:
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    lam = check_lambda(lam)
    current = as_cmatrix(t)
    trace = IterationTrace(iterates=[current])
    for _ in range(max_steps):
        nxt = aluthge(current, lam, cfg)
        res = fro(nxt - current) / max(1.0, fro(current))
        trace.residuals.append(res)
        trace.iterates.append(nxt)
        trace.steps += 1
        current = nxt
        if res <= stop_tol:
            trace.converged = True
            break
    return trace

"""Seeded random matrix families.

Every trial draws from its own generator keyed by ``(seed, trial)`` so that
results do not depend on evaluation order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr
from scipy.stats import norm, qmc

FAMILIES = ("gaussian", "haar", "normal", "projection", "rank_one")


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, trial, stream])


def gaussian(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def gaussian_vector(rng, n):
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)


def haar_unitary(rng, n):
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    q, r = qr(gaussian(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_normal(rng, n):
    u = haar_unitary(rng, n)
    d = gaussian_vector(rng, n)
    return (u * d) @ u.conj().T


def random_projection(rng, n, rank=None):
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    u = haar_unitary(rng, n)[:, :rank]
    return u @ u.conj().T


def random_positive(rng, n, floor=0.1):
    g = gaussian(rng, n)
    return g @ g.conj().T + floor * np.eye(n)


def unit_vector(rng, n):
    v = gaussian_vector(rng, n)
    return v / np.linalg.norm(v)


def halton_unit_vectors(n, count, seed=0):
    """Deterministic low-discrepancy complex unit vectors in C^n."""
    sampler = qmc.Halton(d=2 * n, scramble=True, seed=seed)
    u = np.clip(sampler.random(count), 1e-12, 1 - 1e-12)
    g = norm.ppf(u)
    v = g[:, :n] + 1j * g[:, n:]
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass(frozen=True)
class EnsembleSpec:
    dims: tuple = (2, 3, 4, 5, 6, 7, 8)
    trials: int = 100
    seed: int = 0xA17A
    family: str = "gaussian"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.dims or any(not 1 <= d <= 12 for d in self.dims):
            raise ValueError("dims must be a non-empty subset of 1..12")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    def dim(self, trial: int) -> int:
        return self.dims[trial % len(self.dims)]

    def draw(self, trial: int, stream: int = 0):
        """One matrix of the configured family for ``trial``."""
        rng = trial_rng(self.seed, trial, stream)
        n = self.dim(trial)
        if self.family == "gaussian":
            return gaussian(rng, n)
        if self.family == "haar":
            return haar_unitary(rng, n)
        if self.family == "normal":
            return random_normal(rng, n)
        if self.family == "projection":
            return random_projection(rng, n)
        x, y = gaussian_vector(rng, n), gaussian_vector(rng, n)
        return np.outer(x, y.conj())

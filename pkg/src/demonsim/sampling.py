"""Seeded random operators for property checks and the verify command."""

from __future__ import annotations

import numpy as np

from .linalg import dagger


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (a + dagger(a)) / np.sqrt(dim)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    # fix the QR phase ambiguity so draws are reproducible across BLAS builds
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ dagger(a)
    return rho / np.real(np.trace(rho))


def random_probabilities(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.dirichlet(np.ones(n))

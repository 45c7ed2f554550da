"""Thermal states and the information functionals of feedback control.

All entropies and divergences are in nats.  The zero-probability convention
0*ln(0) = 0 applies throughout; eigenvalues are floored at 1e-300 inside
logarithms only after the state has passed positivity validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SupportViolationError
from .linalg import EigenSystem, as_matrix, dagger, herm_eig, max_abs, require_hermitian

LOG_FLOOR = 1e-300
KL_SUPPORT_TOL = 1e-12
PROBABILITY_SUM_TOL = 1e-10


@dataclass(frozen=True)
class GibbsSpec:
    """A Hamiltonian paired with an inverse temperature (internal units)."""

    hamiltonian: np.ndarray
    beta: float

    def __post_init__(self):
        require_hermitian(self.hamiltonian)
        if not np.isfinite(self.beta) or self.beta < 0.0:
            raise ValueError(f"beta must be finite and non-negative, got {self.beta}")


def _shifted_weights(spec: GibbsSpec) -> tuple[EigenSystem, np.ndarray, float]:
    """Eigensystem plus exp(-beta(E - E_min)) weights; stable at large beta."""
    es = herm_eig(spec.hamiltonian)
    shifted = spec.beta * (es.values - es.values[0])
    return es, np.exp(-shifted), float(es.values[0])


def log_partition_function(spec: GibbsSpec) -> float:
    """ln Z computed without overflow for any beta >= 0."""
    _, weights, e_min = _shifted_weights(spec)
    return float(np.log(np.sum(weights)) - spec.beta * e_min)


def partition_function(spec: GibbsSpec) -> float:
    return float(np.exp(log_partition_function(spec)))


def gibbs_state(spec: GibbsSpec) -> np.ndarray:
    """exp(-beta H)/Z; exactly the maximally mixed state at beta = 0."""
    es, weights, _ = _shifted_weights(spec)
    populations = weights / np.sum(weights)
    return (es.vectors * populations) @ dagger(es.vectors)


def free_energy_change(spec0: GibbsSpec, spec1: GibbsSpec) -> float:
    """Equilibrium free-energy difference -ln(Z1/Z0)/beta at a common beta.

    At beta = 0 the limit is the difference of uniform mean energies.
    """
    if spec0.beta != spec1.beta:
        raise ValueError(f"inverse temperatures differ: {spec0.beta} vs {spec1.beta}")
    if spec0.beta == 0.0:
        h0 = as_matrix(spec0.hamiltonian)
        h1 = as_matrix(spec1.hamiltonian)
        return float(np.real(np.trace(h1)) / h1.shape[0] - np.real(np.trace(h0)) / h0.shape[0])
    return -(log_partition_function(spec1) - log_partition_function(spec0)) / spec0.beta


def _validated_populations(rho, tol: float = 1e-10) -> np.ndarray:
    state = require_hermitian(rho)
    values = np.linalg.eigvalsh(state)
    if values.min() < -tol:
        raise ValueError(f"state has negative eigenvalue {values.min():.3e}")
    if abs(values.sum() - 1.0) > tol:
        raise ValueError(f"state trace {values.sum()} is not 1")
    return np.clip(values, 0.0, None)


def von_neumann_entropy(rho) -> float:
    """-tr(rho ln rho) in nats, clamped to [0, ln dim]."""
    populations = _validated_populations(rho)
    logs = np.log(np.clip(populations, LOG_FLOOR, None))
    s = float(-np.sum(populations * logs))
    return min(max(s, 0.0), float(np.log(len(populations))))


def shannon_entropy(probabilities) -> float:
    """Entropy of a discrete distribution in nats with 0 ln 0 = 0."""
    p = np.asarray(probabilities, dtype=float).ravel()
    if np.any(p < 0.0):
        raise ValueError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > PROBABILITY_SUM_TOL:
        raise ValueError(f"probabilities sum to {p.sum()}, expected 1")
    logs = np.log(np.clip(p, LOG_FLOOR, None))
    return float(-np.sum(p * logs))


def kl_divergence(rho, sigma) -> float:
    """Quantum relative entropy S(rho || sigma) in nats.

    If rho has weight outside the numerical support of sigma the divergence is
    infinite; that is raised as SupportViolationError so averages cannot
    silently swallow it.
    """
    _validated_populations(rho)
    _validated_populations(sigma)
    state = require_hermitian(rho)
    es_sigma = herm_eig(sigma)
    null = es_sigma.values < KL_SUPPORT_TOL
    if np.any(null):
        null_vecs = es_sigma.vectors[:, null]
        leakage = float(np.real(np.trace(dagger(null_vecs) @ state @ null_vecs)))
        if leakage > KL_SUPPORT_TOL:
            raise SupportViolationError(
                f"first state has weight {leakage:.3e} outside the support of the second"
            )
    log_sigma = (es_sigma.vectors * np.log(np.clip(es_sigma.values, LOG_FLOOR, None))) @ dagger(
        es_sigma.vectors
    )
    cross = float(np.real(np.trace(state @ log_sigma)))
    return max(-von_neumann_entropy(rho) - cross, 0.0)


def information_gain(rho, branches) -> float:
    """Measurement information gain S(rho) - sum_l p_l S(rho_l) in nats."""
    total = von_neumann_entropy(rho)
    for p, branch in branches:
        total -= p * von_neumann_entropy(branch)
    return total


def mutual_information(joint) -> float:
    """Classical mutual information of a joint distribution p[k, l] in nats."""
    p = np.asarray(joint, dtype=float)
    if np.any(p < 0.0):
        raise ValueError("joint probabilities must be non-negative")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"joint probabilities sum to {p.sum()}, expected 1")
    p_k = p.sum(axis=1)
    p_l = p.sum(axis=0)
    total = 0.0
    for k in range(p.shape[0]):
        for l in range(p.shape[1]):
            if p[k, l] > 0.0:
                total += p[k, l] * np.log(p[k, l] / (p_k[k] * p_l[l]))
    return float(total)


def random_povm(dim: int, n_outcomes: int, seed: int):
    """Random POVM as Kraus-style elements M_l with sum M^dag M = 1.

    Gaussian draws are normalized by the inverse square root of their Gram
    sum; a single-outcome POVM is therefore unitary-like.
    """
    if dim not in (2, 4):
        raise ValueError(f"random_povm supports dim 2 or 4, got {dim}")
    if n_outcomes < 1:
        raise ValueError("need at least one outcome")
    rng = np.random.default_rng(seed)
    draws = [
        rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        for _ in range(n_outcomes)
    ]
    gram = sum(dagger(a) @ a for a in draws)
    es = herm_eig(gram)
    inv_sqrt = (es.vectors * (1.0 / np.sqrt(es.values))) @ dagger(es.vectors)
    return [a @ inv_sqrt for a in draws]


def povm_information_gain(elements, rho) -> float:
    """Information gain of a general POVM acting by M_l rho M_l^dag."""
    state = as_matrix(rho)
    branches = []
    for m in elements:
        unnorm = m @ state @ dagger(m)
        p = float(np.real(np.trace(unnorm)))
        if p > 1e-14:
            branches.append((p, 0.5 * (unnorm + dagger(unnorm)) / p))
    return information_gain(rho, branches)


def pseudo_temperature(populations, gap_pev: float) -> float:
    """Two-level temperature in peV from (ground, excited) populations."""
    p_ground, p_excited = populations
    if p_ground <= 0.0 or p_excited <= 0.0:
        raise ValueError("populations must be strictly positive")
    if p_ground <= p_excited:
        raise ValueError("ground population must exceed excited population")
    return gap_pev / float(np.log(p_ground / p_excited))

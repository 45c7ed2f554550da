"""Work statistics of the feedback protocol by exhaustive path enumeration.

A path fixes the initial energy outcome n, the measurement outcome l, the
feedback index k actually applied, the Kraus index j inside the feedback
channel and the final energy outcome m.  Its probability is

    p(n, l, k, j, m) = p(k|l) * w_n * tr(P_m G_j M_l U Pi_n U^dag M_l G_j^dag)

with w_n the Gibbs weight of the initial energy eigenvalue.  Work is the
two-point energy difference e_m - e_n.  The feedback average of
exp(-beta(W - dF^(k)) - I^(k,l)) over these paths equals one exactly when
every feedback channel is unital; a non-unital channel breaks it, which the
negative-control helpers below make observable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    amplitude_damping_channel,
    compose,
    dephasing_channel,
    is_unital,
    kraus_channel,
    projective_instrument,
)
from .errors import DegenerateMarginalError, NonUnitalFeedbackError
from .linalg import dagger, eigen_groups, herm_eig
from .protocol import ProtocolEnsemble, build_ensemble
from .sampling import random_hermitian, random_probabilities, random_unitary

ATOM_MERGE_TOL = 1e-10


@dataclass(frozen=True)
class WorkPath:
    """One (n, l, k, j, m) trajectory with its probability and work value.

    base_prob is the conditional-free weight w_n * core, so prob equals
    p(k|l) * base_prob.  The fluctuation average needs it separately: a
    path's term is prob * exp(-I) * exp(-beta(W - dF)) and the information
    weight exp(-I) = p(k)/p(k|l) cancels the conditional factor exactly, so
    the term stays finite and nonzero even where p(k|l) itself vanishes.
    """

    n: int
    l: int
    k: int
    j: int
    m: int
    prob: float
    base_prob: float
    work: float


@dataclass
class WorkDistribution:
    """Discrete work distribution; atoms closer than 1e-10 are merged."""

    values: np.ndarray
    probabilities: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def _initial_weights(ens: ProtocolEnsemble, groups0):
    """Gibbs weight exp(-beta e_n)/Z0 for each initial eigenvalue group."""
    energies = np.array([e for e, _ in groups0])
    degeneracies = np.array([float(np.real(np.trace(p))) for _, p in groups0])
    shifted = ens.beta * (energies - energies.min())
    z_shifted = float(np.sum(degeneracies * np.exp(-shifted)))
    return np.exp(-shifted) / z_shifted


def enumerate_paths(ens: ProtocolEnsemble, require_unital: bool = True):
    """All two-point-energy trajectories of the run, zero-probability included.

    Raises NonUnitalFeedbackError when a feedback channel is not unital,
    because the fluctuation identity downstream assumes it; pass
    require_unital=False only to study that failure deliberately.
    """
    for k, channel in enumerate(ens.feedback):
        if require_unital and not is_unital(channel):
            raise NonUnitalFeedbackError(f"feedback channel {k} is not unital")

    groups0 = eigen_groups(ens.es0)
    weights0 = _initial_weights(ens, groups0)
    paths = []
    for k, channel in enumerate(ens.feedback):
        groups_final = eigen_groups(ens.es_final[k])
        for l, m_op in enumerate(ens.instrument.projectors):
            base = m_op @ ens.quench_unitary
            conditional = float(ens.p_k_given_l[k, l])
            for j, g in enumerate(channel.ops):
                b = g @ base
                for n, (e_n, proj_n) in enumerate(groups0):
                    bn = b @ proj_n
                    for m, (e_m, proj_m) in enumerate(groups_final):
                        core = float(np.sum(np.abs(proj_m @ bn) ** 2))
                        weight = weights0[n] * core
                        paths.append(
                            WorkPath(
                                n=n,
                                l=l,
                                k=k,
                                j=j,
                                m=m,
                                prob=conditional * weight,
                                base_prob=weight,
                                work=float(e_m - e_n),
                            )
                        )
    return paths


def work_distribution(paths) -> WorkDistribution:
    """Collapse paths onto the work axis, merging atoms within 1e-10."""
    order = sorted(paths, key=lambda p: p.work)
    values = []
    probabilities = []
    for path in order:
        if values and path.work - values[-1] <= ATOM_MERGE_TOL:
            merged = probabilities[-1] + path.prob
            if merged > 0.0:
                values[-1] = (values[-1] * probabilities[-1] + path.work * path.prob) / merged
            probabilities[-1] = merged
        else:
            values.append(path.work)
            probabilities.append(path.prob)
    values_arr = np.array(values)
    probs_arr = np.array(probabilities)
    realized = probs_arr > 0.0
    return WorkDistribution(values=values_arr[realized], probabilities=probs_arr[realized])


def average_work(paths) -> float:
    return float(sum(p.prob * p.work for p in paths))


def average_work_from_states(ens: ProtocolEnsemble) -> float:
    """Independent route to the mean work: branch-state energy bookkeeping."""
    final_energy = 0.0
    for branch in ens.branches:
        h = ens.h_final[branch.k]
        final_energy += branch.joint_prob * float(np.real(np.trace(h @ branch.final_state)))
    initial_energy = float(np.real(np.trace(ens.h0 @ ens.rho0)))
    return final_energy - initial_energy


def feedback_marginal(paths, n_k: int) -> np.ndarray:
    """p(k) recovered by exact marginalization of the path table."""
    p_k = np.zeros(n_k)
    for path in paths:
        p_k[path.k] += path.prob
    return p_k


def entropy_production(paths, d_f, beta: float) -> float:
    """Average entropy production beta * <W - dF^(k)> in nats."""
    d_f = np.atleast_1d(np.asarray(d_f, dtype=float))
    n_k = max(p.k for p in paths) + 1
    if d_f.size == 1:
        d_f = np.full(n_k, d_f[0])
    p_k = feedback_marginal(paths, n_k)
    return float(beta * (average_work(paths) - np.dot(p_k, d_f)))


def fluctuation_functional(paths, d_f, beta: float, p_k_given_l, p_l) -> float:
    """<exp(-beta(W - dF^(k)) - I^(k,l))> over the path table.

    The information weights use the ensemble's exact conditional p(k|l) and
    the marginal p(k) it implies; they are never re-estimated from the paths.
    Each term is evaluated as p(k) * base_prob * exp(-beta(W - dF^(k))), the
    algebraic cancellation of p(k|l) against exp(-I); this is identical to
    the literal product where p(k|l) > 0 and is its (finite, nonzero)
    continuous extension on paths where p(k|l) = 0.
    """
    conditional = np.asarray(p_k_given_l, dtype=float)
    marginal_l = np.asarray(p_l, dtype=float)
    p_k = conditional @ marginal_l
    if np.any(p_k <= 0.0):
        raise DegenerateMarginalError(f"feedback marginal has a zero entry: {p_k}")
    d_f = np.atleast_1d(np.asarray(d_f, dtype=float))
    if d_f.size == 1:
        d_f = np.full(conditional.shape[0], d_f[0])
    total = 0.0
    for path in paths:
        total += p_k[path.k] * path.base_prob * np.exp(-beta * (path.work - d_f[path.k]))
    return float(total)


def jensen_bound_check(sigma: float, mutual_info: float, tol: float = 1e-9) -> bool:
    """Second-law-with-information bound: sigma >= -<I> up to tolerance."""
    return sigma + mutual_info >= -tol


def work_distribution_to_csv(dist: WorkDistribution, energy_unit_pev: float) -> str:
    """CSV text with columns work_internal, work_peV, probability."""
    lines = ["work_internal,work_peV,probability"]
    for value, prob in zip(dist.values, dist.probabilities):
        lines.append(f"{value:.17g},{value * energy_unit_pev:.17g},{prob:.17g}")
    return "\n".join(lines) + "\n"


def nonunital_variant(ens: ProtocolEnsemble, damping: float = 0.2) -> ProtocolEnsemble:
    """The same run with amplitude damping composed after each feedback channel.

    The damped channels are trace preserving but not unital, so the
    fluctuation functional must come out away from one.
    """
    damped = []
    for k, channel in enumerate(ens.feedback):
        basis = herm_eig(ens.h_final[k])
        damped.append(compose(amplitude_damping_channel(damping, basis), channel))
    return build_ensemble(
        beta=ens.beta,
        h0=ens.h0,
        quench_unitary=ens.quench_unitary,
        instrument=ens.instrument,
        p_k_given_l=ens.p_k_given_l,
        feedback=damped,
        h_final=ens.h_final,
        config=ens.config,
    )


def random_unital_ensemble(seed: int, dim: int = 4, n_feedback: int = 2) -> ProtocolEnsemble:
    """A seeded random quench-measure-feedback run with unital feedback.

    Hamiltonians, quench unitary, measured observable and the conditional
    p(k|l) are all random; each feedback channel is a mixture of random
    unitaries composed with dephasing in its final Hamiltonian eigenbasis,
    hence unital.  Used to check the fluctuation identity far away from the
    demon's special structure.
    """
    rng = np.random.default_rng(seed)
    h0 = random_hermitian(rng, dim)
    beta = float(rng.uniform(0.1, 1.5))
    quench = random_unitary(rng, dim)
    instrument = projective_instrument(random_hermitian(rng, dim))
    p_k_given_l = np.column_stack(
        [random_probabilities(rng, n_feedback) for _ in range(len(instrument))]
    )
    h_final = [random_hermitian(rng, dim) for _ in range(n_feedback)]
    feedback = []
    for k in range(n_feedback):
        weights = random_probabilities(rng, 3)
        mixture = kraus_channel(
            [np.sqrt(w) * random_unitary(rng, dim) for w in weights], label="mixture"
        )
        feedback.append(compose(dephasing_channel(herm_eig(h_final[k])), mixture))
    return build_ensemble(
        beta=beta,
        h0=h0,
        quench_unitary=quench,
        instrument=instrument,
        p_k_given_l=p_k_given_l,
        feedback=feedback,
        h_final=h_final,
    )

"""Quantum channels, projective instruments and process (chi) matrices.

Channels are Kraus-operator collections validated for trace preservation at
construction.  Process matrices use the operator basis (I, i*sx, i*sy, i*sz)
per qubit, in which every unitary has real coordinates, so unital channels
built from unitary mixtures come out with purely real chi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOperatorError, UnsupportedDimensionError
from .linalg import (
    IDENTITY2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    EigenSystem,
    as_matrix,
    dagger,
    eigen_groups,
    herm_eig,
    max_abs,
    tensor,
    trace_norm,
)

TRACE_PRESERVATION_TOL = 1e-10
UNITALITY_TOL = 1e-10
PSD_CLAMP_TOL = -1e-10
BRANCH_PRUNE_TOL = 1e-14

# chi basis for one qubit; the i factors make unitary coordinates real.
CHI_BASIS_1Q = (IDENTITY2, 1j * SIGMA_X, 1j * SIGMA_Y, 1j * SIGMA_Z)
CHI_LABELS_1Q = ("I", "iX", "iY", "iZ")


@dataclass
class KrausChannel:
    """A completely positive trace-preserving map given by Kraus operators."""

    ops: tuple
    label: str = ""

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def __iter__(self):
        return iter(self.ops)


def kraus_channel(ops, label: str = "") -> KrausChannel:
    """Validate a Kraus set (common dimension, sum of K^dag K equal to 1)."""
    mats = tuple(as_matrix(op) for op in ops)
    if not mats:
        raise InvalidOperatorError("a channel needs at least one Kraus operator")
    dim = mats[0].shape[0]
    if any(m.shape[0] != dim for m in mats):
        raise InvalidOperatorError("Kraus operators must share one dimension")
    total = sum(dagger(m) @ m for m in mats)
    defect = max_abs(total - np.eye(dim))
    if defect > TRACE_PRESERVATION_TOL:
        raise InvalidOperatorError(
            f"Kraus set is not trace preserving within {TRACE_PRESERVATION_TOL}: defect {defect:.3e}"
        )
    return KrausChannel(ops=mats, label=label)


def is_unital(channel: KrausChannel, tol: float = UNITALITY_TOL) -> bool:
    total = sum(m @ dagger(m) for m in channel.ops)
    return max_abs(total - np.eye(channel.dim)) <= tol


def apply_channel(channel: KrausChannel, rho) -> np.ndarray:
    """Apply the channel and clamp eigenvalue dust from roundoff.

    Output eigenvalues may only dip as low as -1e-10 before the state is
    rejected as non-physical.
    """
    state = as_matrix(rho)
    out = sum(k @ state @ dagger(k) for k in channel.ops)
    out = 0.5 * (out + dagger(out))
    smallest = float(np.min(np.linalg.eigvalsh(out)))
    if smallest < PSD_CLAMP_TOL:
        raise InvalidOperatorError(f"channel output has eigenvalue {smallest:.3e} below clamp")
    if smallest < 0.0:
        es = herm_eig(out)
        out = (es.vectors * np.clip(es.values, 0.0, None)) @ dagger(es.vectors)
    return out


def identity_channel(dim: int = 2) -> KrausChannel:
    return kraus_channel([np.eye(dim, dtype=complex)], label="identity")


def unitary_channel(u, tol: float = 1e-10) -> KrausChannel:
    m = as_matrix(u)
    if max_abs(dagger(m) @ m - np.eye(m.shape[0])) > tol:
        raise InvalidOperatorError("operator is not unitary within tolerance")
    return KrausChannel(ops=(m,), label="unitary")


def dephasing_channel(basis: EigenSystem) -> KrausChannel:
    """Full dephasing in the eigenbasis of an observable.

    Kraus operators are the (possibly degenerate) eigenprojectors, so the map
    kills coherences between distinct eigenvalues and nothing else.
    """
    vecs = basis.vectors
    gram = dagger(vecs) @ vecs
    if max_abs(gram - np.eye(vecs.shape[1])) > 1e-10:
        raise InvalidOperatorError("basis vectors are not orthonormal")
    projectors = [proj for _, proj in eigen_groups(basis)]
    return kraus_channel(projectors, label="dephasing")


def depolarizing_channel(q: float, dim: int = 2) -> KrausChannel:
    """Isotropic depolarizing: rho -> (1-q) rho + q * identity/dim."""
    if not 0.0 <= q < 1.0:
        raise ValueError(f"depolarizing strength must be in [0, 1), got {q}")
    paulis = (IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z)
    if dim == 2:
        basis_ops = list(paulis)
    elif dim == 4:
        basis_ops = [tensor(a, b) for a in paulis for b in paulis]
    else:
        raise UnsupportedDimensionError(
            f"depolarizing_channel supports dim 2 or 4, got {dim}"
        )
    # uniform twirl over the n-qubit Pauli group averages to identity/dim
    n_ops = len(basis_ops)
    survive = np.sqrt(1.0 - q * (n_ops - 1) / n_ops)
    scramble = np.sqrt(q / n_ops)
    ops = [survive * basis_ops[0]] + [scramble * p for p in basis_ops[1:]]
    return kraus_channel(ops, label="depolarizing")


def amplitude_damping_channel(q: float, basis: EigenSystem) -> KrausChannel:
    """Damping of the second basis state into the first with probability q.

    Deliberately non-unital; used as the negative control that shows the
    fluctuation identity really does require unital feedback.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"damping probability must be in [0, 1], got {q}")
    lo = basis.vectors[:, :1]
    hi = basis.vectors[:, 1:2]
    keep = lo @ dagger(lo) + np.sqrt(1.0 - q) * (hi @ dagger(hi))
    decay = np.sqrt(q) * (lo @ dagger(hi))
    return kraus_channel([keep, decay], label="amplitude-damping")


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """Channel composition outer(inner(rho)) with the product Kraus set."""
    if outer.dim != inner.dim:
        raise ValueError(f"dimension mismatch: {outer.dim} vs {inner.dim}")
    ops = [a @ b for a in outer.ops for b in inner.ops]
    label = f"{outer.label}*{inner.label}" if outer.label and inner.label else ""
    return kraus_channel(ops, label=label)


@dataclass
class MeasurementInstrument:
    """Projective measurement: orthogonal, complete projectors with integer
    labels assigned in ascending eigenvalue order."""

    projectors: tuple
    labels: tuple
    eigenvalues: tuple

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self) -> int:
        return len(self.projectors)


def projective_instrument(observable) -> MeasurementInstrument:
    """Instrument measuring a Hermitian observable in its eigenbasis."""
    groups = eigen_groups(herm_eig(observable))
    projectors = tuple(proj for _, proj in groups)
    eigenvalues = tuple(value for value, _ in groups)
    total = sum(projectors)
    if max_abs(total - np.eye(projectors[0].shape[0])) > 1e-10:
        raise InvalidOperatorError("eigenprojectors do not resolve the identity")
    return MeasurementInstrument(
        projectors=projectors,
        labels=tuple(range(len(projectors))),
        eigenvalues=eigenvalues,
    )


def measure_nonselective(instrument: MeasurementInstrument, rho):
    """Branch list [(p_l, post_state_l)] with branches below 1e-14 pruned."""
    state = as_matrix(rho)
    branches = []
    for proj in instrument.projectors:
        unnorm = proj @ state @ proj
        p = float(np.real(np.trace(unnorm)))
        if p < BRANCH_PRUNE_TOL:
            continue
        branches.append((p, unnorm / p))
    return branches


def instrument_channel(instrument: MeasurementInstrument) -> KrausChannel:
    """The nonselective measurement map; identical to dephasing in the measured basis."""
    return kraus_channel(instrument.projectors, label="measurement")


@dataclass
class ChiMatrix:
    """Process matrix in the (I, i*sx, i*sy, i*sz)^(n_qubits) basis.

    Convention: the row indexes the left basis element and the column the
    right one in sum_{s,l} chi[s,l] Xi_s rho Xi_l^dag; the process distance is
    invariant under transposing both arguments.
    """

    matrix: np.ndarray
    n_qubits: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _chi_basis(dim: int):
    if dim == 2:
        return list(CHI_BASIS_1Q)
    if dim == 4:
        return [tensor(a, b) for a in CHI_BASIS_1Q for b in CHI_BASIS_1Q]
    raise ValueError(f"chi basis defined for channel dim 2 or 4, got {dim}")


def channel_to_chi(channel: KrausChannel) -> ChiMatrix:
    """Expand the Kraus set in the chi basis: chi = sum_j c_j c_j^dag."""
    basis = _chi_basis(channel.dim)
    n = len(basis)
    coords = np.zeros((len(channel.ops), n), dtype=complex)
    for j, op in enumerate(channel.ops):
        for s, element in enumerate(basis):
            coords[j, s] = np.trace(dagger(element) @ op) / channel.dim
    chi = coords.T @ np.conj(coords)
    return ChiMatrix(matrix=chi, n_qubits=1 if channel.dim == 2 else 2)


def apply_chi(chi: ChiMatrix, rho) -> np.ndarray:
    """Act with the process matrix directly; used for round-trip checks."""
    dim = 2 if chi.n_qubits == 1 else 4
    basis = _chi_basis(dim)
    state = as_matrix(rho)
    out = np.zeros_like(state)
    for s, left in enumerate(basis):
        for l, right in enumerate(basis):
            if chi.matrix[s, l] != 0.0:
                out = out + chi.matrix[s, l] * (left @ state @ dagger(right))
    return out


def process_distance(a: ChiMatrix, b: ChiMatrix) -> float:
    """Half the trace norm of the chi difference."""
    if a.dim != b.dim:
        raise ValueError(f"chi dimension mismatch: {a.dim} vs {b.dim}")
    return 0.5 * trace_norm(a.matrix - b.matrix)


def chi_to_text(chi: ChiMatrix) -> str:
    """Plain-text serialization: first line dim=N, then row-major re,im pairs."""
    lines = [f"dim={chi.dim}"]
    for row in chi.matrix:
        lines.append(" ".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def chi_from_text(text: str) -> ChiMatrix:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    header = lines[0].strip()
    if not header.startswith("dim="):
        raise ValueError("chi text must start with a dim= header")
    dim = int(header.split("=", 1)[1])
    if dim not in (4, 16):
        raise ValueError(f"chi dimension must be 4 or 16, got {dim}")
    if len(lines) != dim + 1:
        raise ValueError(f"expected {dim} matrix rows, got {len(lines) - 1}")
    matrix = np.zeros((dim, dim), dtype=complex)
    for i, line in enumerate(lines[1:]):
        entries = line.split()
        if len(entries) != dim:
            raise ValueError(f"row {i} has {len(entries)} entries, expected {dim}")
        for j, entry in enumerate(entries):
            re_part, im_part = entry.split(",")
            matrix[i, j] = float(re_part) + 1j * float(im_part)
    return ChiMatrix(matrix=matrix, n_qubits=1 if dim == 4 else 2)

"""Dense complex linear algebra for one- and two-qubit operators.

Everything here is a thin, contract-checked layer over numpy: deterministic
Hermitian eigendecompositions, spectral matrix functions, tensor products in
the fixed (memory, system) subsystem order, partial traces and the trace norm.
Only dimensions 2 and 4 are supported; nothing in the protocol needs more.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOperatorError, UnsupportedDimensionError

HERMITICITY_TOL = 1e-12
DEGENERACY_TOL = 1e-10

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Subsystem ids for partial_trace; tensor(a, b) puts `a` on the memory slot.
MEMORY = 0
SYSTEM = 1

SUPPORTED_DIMS = (2, 4)


@dataclass
class EigenSystem:
    """Eigenvalues in ascending order and eigenvectors as matching columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def as_matrix(m) -> np.ndarray:
    """Validate a square complex matrix of supported dimension with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidOperatorError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] not in SUPPORTED_DIMS:
        raise UnsupportedDimensionError(
            f"dimension {a.shape[0]} not supported (only {SUPPORTED_DIMS})"
        )
    if not np.all(np.isfinite(a.view(float))):
        raise InvalidOperatorError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def max_abs(m) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def require_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = as_matrix(m)
    defect = max_abs(a - dagger(a))
    if defect > tol:
        raise InvalidOperatorError(f"matrix is not Hermitian within {tol}: defect {defect:.3e}")
    return 0.5 * (a + dagger(a))


def _canonical_phases(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Fix each eigenvector's global phase: first component above `tol` in
    magnitude is made real and positive.  Keeps golden tests byte-stable."""
    out = np.array(vectors, dtype=complex)
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size == 0:
            continue
        pivot = col[idx[0]]
        out[:, j] = col * (np.conj(pivot) / abs(pivot))
    return out


def herm_eig(m, tol: float = HERMITICITY_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back ascending; eigenvector phases are canonicalized so
    repeated calls on the same input are bit-for-bit identical.
    """
    h = require_hermitian(m, tol)
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(values=values, vectors=_canonical_phases(vectors))


def eigen_groups(es: EigenSystem, tol: float = DEGENERACY_TOL):
    """Group degenerate eigenvalues into (value, projector) pairs, ascending."""
    groups = []
    start = 0
    n = es.dim
    for i in range(1, n + 1):
        if i == n or es.values[i] - es.values[start] > tol:
            block = es.vectors[:, start:i]
            groups.append((float(np.mean(es.values[start:i])), block @ dagger(block)))
            start = i
    return groups


def mat_func(m, f, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    es = herm_eig(m, tol)
    with np.errstate(all="ignore"):  # out-of-domain values are rejected below
        fvals = np.array([f(v) for v in es.values], dtype=complex)
    if not np.all(np.isfinite(fvals.view(float))):
        raise ValueError("function is not finite on the spectrum")
    return (es.vectors * fvals) @ dagger(es.vectors)


def tensor(a, b) -> np.ndarray:
    """Kronecker product with `a` on the memory slot and `b` on the system slot."""
    am = as_matrix(a)
    bm = as_matrix(b)
    if am.shape[0] != 2 or bm.shape[0] != 2:
        raise UnsupportedDimensionError("tensor only combines two single-qubit operators")
    return np.kron(am, bm)


def partial_trace(m, keep: int) -> np.ndarray:
    """Trace out one qubit of a two-qubit operator.

    keep=MEMORY returns the memory factor, keep=SYSTEM the system factor.
    """
    a = as_matrix(m)
    if a.shape[0] != 4:
        raise UnsupportedDimensionError("partial_trace expects a 4x4 operator")
    if keep not in (MEMORY, SYSTEM):
        raise ValueError(f"keep must be {MEMORY} (memory) or {SYSTEM} (system), got {keep}")
    t = a.reshape(2, 2, 2, 2)
    if keep == MEMORY:
        return np.einsum("isjs->ij", t)
    return np.einsum("sisj->ij", t)


def trace_norm(m) -> float:
    """Sum of singular values; for Hermitian input this is the sum of |eigenvalues|."""
    a = as_matrix(m)
    if max_abs(a - dagger(a)) <= HERMITICITY_TOL:
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + dagger(a))))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))

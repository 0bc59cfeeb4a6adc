"""Dense complex linear algebra: states, Hermitian operators, eigensystems, evolution.

Everything is a plain dense ndarray under the hood; target dimensions are
small (<= a few hundred), so no sparsity machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

HERMITICITY_ATOL = 1e-10


def as_complex_matrix(entries) -> np.ndarray:
    """Validate and return a square complex matrix with finite entries."""
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix dimension must be >= 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product, a-index major (row-major block layout)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """ab - ba."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt norm sqrt(Tr(A^dag A)) (Frobenius norm)."""
    return float(np.linalg.norm(a))


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Tr(ab) for Hermitian a and b.

    Raises if the trace has a significant imaginary part, which indicates a
    non-Hermitian input.
    """
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    val = complex(np.einsum("ij,ji->", a, b))
    if abs(val.imag) > 1e-8 * (1.0 + abs(val)):
        raise ValueError("Tr(ab) is not real; inputs are not both Hermitian")
    return float(val.real)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues (real, ascending) and unitary eigenvector matrix (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    def phases(self, tau: float) -> np.ndarray:
        return np.exp(-1j * self.eigenvalues * tau)


def _eigensystem(m: np.ndarray) -> EigenSystem:
    vals, vecs = np.linalg.eigh(m)
    scale = float(np.max(np.abs(m)))
    recon_err = float(np.max(np.abs((vecs * vals) @ vecs.conj().T - m)))
    if recon_err > 1e-8 * scale + 1e-14:
        raise np.linalg.LinAlgError(
            f"eigendecomposition failed to reconstruct input (error {recon_err:.3e})"
        )
    ortho_err = float(np.max(np.abs(vecs.conj().T @ vecs - np.eye(m.shape[0]))))
    if ortho_err > 1e-10:
        raise np.linalg.LinAlgError(f"eigenvectors not unitary (error {ortho_err:.3e})")
    vals.flags.writeable = False
    vecs.flags.writeable = False
    return EigenSystem(vals, vecs)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A labeled Hermitian matrix.

    Inputs within 1e-10 of Hermitian are symmetrized; anything farther is
    rejected. The eigendecomposition and Schatten-inf norm are computed once
    and cached, so repeated time evolution under the same operator costs
    O(dim^2) per step.
    """

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        dev = float(np.max(np.abs(m - m.conj().T)))
        if dev > HERMITICITY_ATOL:
            raise ValueError(
                f"matrix {self.label!r} is not Hermitian (max deviation {dev:.3e})"
            )
        m = (m + m.conj().T) / 2
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eig(self) -> EigenSystem:
        return _eigensystem(self.matrix)

    @cached_property
    def schatten_inf(self) -> float:
        return float(np.max(np.abs(self.eig.eigenvalues)))


def eig_hermitian(h: HermitianOperator) -> EigenSystem:
    """Cached eigendecomposition of a Hermitian operator, eigenvalues ascending."""
    return h.eig


def schatten_inf(h: HermitianOperator) -> float:
    """Largest absolute eigenvalue (largest singular value for Hermitian input)."""
    return h.schatten_inf


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure state vector (1-d data) or density matrix (2-d data).

    Construct external inputs through pure_state / mixed_state, which run the
    full invariant checks; the bare constructor does only the cheap ones and
    is what evolution uses internally.
    """

    data: np.ndarray
    structure: Any = None

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        if d.ndim == 1:
            nrm = float(np.linalg.norm(d))
            if not np.isfinite(nrm) or abs(nrm - 1.0) > 1e-8:
                raise ValueError(f"pure state norm {nrm} too far from 1")
            d = d / nrm
        elif d.ndim == 2:
            d = as_complex_matrix(d)
            dev = float(np.max(np.abs(d - d.conj().T)))
            if dev > 1e-8:
                raise ValueError(f"density matrix not Hermitian (deviation {dev:.3e})")
            d = (d + d.conj().T) / 2
            tr = float(np.trace(d).real)
            if abs(tr - 1.0) > 1e-8:
                raise ValueError(f"density matrix trace {tr} too far from 1")
            d = d / tr
        else:
            raise ValueError("state data must be a vector or a square matrix")
        d.flags.writeable = False
        object.__setattr__(self, "data", d)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def density(self) -> np.ndarray:
        """Density-matrix view of the state."""
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def purity(self) -> float:
        if self.is_pure:
            return 1.0
        return hs_inner(self.data, self.data)


def pure_state(vector, structure: Any = None) -> QuantumState:
    """Pure state from a vector; norm must already be 1 within 1e-10."""
    v = np.asarray(vector, dtype=complex)
    if v.ndim != 1:
        raise ValueError("pure state expects a 1-d amplitude vector")
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"vector norm {nrm} is not 1 within 1e-10")
    return QuantumState(v / nrm, structure)


def mixed_state(matrix, structure: Any = None) -> QuantumState:
    """Density matrix from a Hermitian, unit-trace, PSD matrix (1e-10 tolerances)."""
    m = as_complex_matrix(matrix)
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > HERMITICITY_ATOL:
        raise ValueError(f"density matrix not Hermitian (deviation {dev:.3e})")
    m = (m + m.conj().T) / 2
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"density matrix trace {tr} is not 1 within 1e-10")
    min_eig = float(np.min(np.linalg.eigvalsh(m)))
    if min_eig < -1e-10:
        raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")
    return QuantumState(m / tr, structure)


def evolve_unitary(state: QuantumState, eig: EigenSystem, tau: float) -> QuantumState:
    """Apply U = V diag(exp(-i e tau)) V^dag to the state.

    Pure states stay pure and mixed states stay unit-trace PSD; the cached
    eigenbasis makes each application O(dim^2) for pure states.
    """
    if eig.dim != state.dim:
        raise ValueError(f"dimension mismatch: operator {eig.dim}, state {state.dim}")
    ph = eig.phases(tau)
    v = eig.eigenvectors
    if state.is_pure:
        out = v @ (ph * (v.conj().T @ state.data))
        return QuantumState(out, state.structure)
    u = (v * ph) @ v.conj().T
    rho = u @ state.data @ u.conj().T
    return QuantumState(rho, state.structure)


def fidelity(target_pure: QuantumState, other: QuantumState) -> float:
    """|<psi|phi>|^2 against a pure other, <psi|rho|psi> against a mixed one."""
    if not target_pure.is_pure:
        raise ValueError("fidelity target must be a pure state")
    if target_pure.dim != other.dim:
        raise ValueError(
            f"dimension mismatch: target {target_pure.dim}, other {other.dim}"
        )
    if other.is_pure:
        f = abs(np.vdot(target_pure.data, other.data)) ** 2
    else:
        f = float(np.real(np.vdot(target_pure.data, other.data @ target_pure.data)))
    return float(min(max(f, 0.0), 1.0))

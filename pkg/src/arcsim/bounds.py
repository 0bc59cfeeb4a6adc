"""Liouvillian calculus and averaged per-step error bounds for the protocols.

The three circuit-depth bounds share the prefactor t^2/(2N) times the average
over the supplied exact-trajectory states of a per-step bracket:

    trotter1: || sum_{j<k} [L_j, L_k](rho_i) ||
    rc:       || L^2(rho_i) || + lambda * sum_j || L_j^2(rho_i) || / ||H_j||_inf
    arc:      || L^2(rho_i) || + ( sum_j sqrt(|| L_j^2(rho_i) ||) )^2

with L_j(rho) = -i [H_j, rho]. Superoperators are never materialized; every
Liouvillian action is a nested commutator on rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compilers import StepPlan
from .hamiltonians import Decomposition
from .linalg import HermitianOperator, QuantumState, commutator, hs_norm


@dataclass(eq=False)
class BoundReport:
    """State-dependent depth bounds and their per-step bracket values."""

    trotter1: float
    rc: float
    arc: float
    per_step: dict[str, list[float]]
    total_time: float
    steps: int

    def __post_init__(self):
        if self.arc > self.rc * (1.0 + 1e-9):
            raise ValueError(
                f"adaptive bound {self.arc} exceeds fixed-weight bound {self.rc}"
            )


@dataclass(frozen=True)
class ShotParams:
    """Inputs to the measurement-shot lower bounds.

    k and w are the largest qubit supports of the Pauli strings measured for
    dynamics observables and for the adaptive weights; S and R the exponents
    of their string counts; eps_stat the statistical error target.
    """

    k: int
    w: int
    S: int
    R: int
    n_qubits: int
    eps_stat: float

    def __post_init__(self):
        if self.k < 1 or self.w < 1:
            raise ValueError("locality parameters k, w must be >= 1")
        if self.S < 0 or self.R < 0:
            raise ValueError("exponents S, R must be nonnegative")
        if self.n_qubits < 1:
            raise ValueError("qubit count must be >= 1")
        if not self.eps_stat > 0:
            raise ValueError("statistical error must be positive")


def liouvillian(h: HermitianOperator, rho: QuantumState) -> np.ndarray:
    """Generator action -i [H, rho]; the result is Hermitian and traceless."""
    r = rho.density()
    if h.dim != rho.dim:
        raise ValueError(f"dimension mismatch: operator {h.dim}, state {rho.dim}")
    return -1j * commutator(h.matrix, r)


def _l2(hmat: np.ndarray, rho: np.ndarray) -> np.ndarray:
    # L^2(rho) = -[H, [H, rho]]
    return -commutator(hmat, commutator(hmat, rho))


def _densities(exact_states: list[QuantumState]) -> list[np.ndarray]:
    if not exact_states:
        raise ValueError("empty exact-state list")
    return [s.density() for s in exact_states]


def trotter1_bound(
    decomposition: Decomposition, exact_states: list[QuantumState], plan: StepPlan
) -> float:
    """Averaged commutator bound (t^2/2N) * mean_i ||sum_{j<k} [L_j, L_k](rho_i)||."""
    return _prefactor(plan) * float(np.mean(trotter1_per_step(decomposition, exact_states)))


def trotter1_per_step(
    decomposition: Decomposition, exact_states: list[QuantumState]
) -> list[float]:
    mats = [t.matrix for t in decomposition.terms]
    out = []
    for rho in _densities(exact_states):
        inner = [commutator(m, rho) for m in mats]
        acc = np.zeros_like(rho)
        for j in range(len(mats)):
            for k in range(j + 1, len(mats)):
                # [L_j, L_k](rho) = -([H_j,[H_k,rho]] - [H_k,[H_j,rho]])
                acc -= commutator(mats[j], inner[k]) - commutator(mats[k], inner[j])
        out.append(hs_norm(acc))
    return out


def rc_bound(
    decomposition: Decomposition, exact_states: list[QuantumState], plan: StepPlan
) -> float:
    """Fixed-weight bound with the lambda-weighted sum of individual generators."""
    return _prefactor(plan) * float(np.mean(rc_per_step(decomposition, exact_states)))


def rc_per_step(decomposition: Decomposition, exact_states: list[QuantumState]) -> list[float]:
    norms = decomposition.inf_norms
    if any(n <= 0 for n in norms):
        raise ValueError("zero-norm term present; drop it before computing the rc bound")
    lam = decomposition.lam
    total = decomposition.total_operator.matrix
    out = []
    for rho in _densities(exact_states):
        collective = hs_norm(_l2(total, rho))
        weighted = sum(
            hs_norm(_l2(t.matrix, rho)) / n for t, n in zip(decomposition.terms, norms)
        )
        out.append(collective + lam * weighted)
    return out


def arc_bound(
    decomposition: Decomposition, exact_states: list[QuantumState], plan: StepPlan
) -> float:
    """Adaptive bound with the squared sum of square-rooted generator norms."""
    return _prefactor(plan) * float(np.mean(arc_per_step(decomposition, exact_states)))


def arc_per_step(decomposition: Decomposition, exact_states: list[QuantumState]) -> list[float]:
    total = decomposition.total_operator.matrix
    out = []
    for rho in _densities(exact_states):
        collective = hs_norm(_l2(total, rho))
        root_sum = sum(math.sqrt(hs_norm(_l2(t.matrix, rho))) for t in decomposition.terms)
        out.append(collective + root_sum**2)
    return out


def _prefactor(plan: StepPlan) -> float:
    return plan.total_time**2 / (2.0 * plan.steps)


def bound_report(
    decomposition: Decomposition, exact_states: list[QuantumState], plan: StepPlan
) -> BoundReport:
    """All three bounds over one exact trajectory."""
    per_step = {
        "trotter1": trotter1_per_step(decomposition, exact_states),
        "rc": rc_per_step(decomposition, exact_states),
        "arc": arc_per_step(decomposition, exact_states),
    }
    pre = _prefactor(plan)
    return BoundReport(
        trotter1=pre * float(np.mean(per_step["trotter1"])),
        rc=pre * float(np.mean(per_step["rc"])),
        arc=pre * float(np.mean(per_step["arc"])),
        per_step=per_step,
        total_time=plan.total_time,
        steps=plan.steps,
    )


def check_cauchy_schwarz(
    decomposition: Decomposition, rho: QuantumState
) -> tuple[float, float, bool]:
    """Compare (sum_j sqrt||L_j^2(rho)||)^2 against lambda sum_j ||L_j^2(rho)||/||H_j||_inf."""
    norms = decomposition.inf_norms
    if any(n <= 0 for n in norms):
        raise ValueError("zero-norm term present")
    r = rho.density()
    l2_norms = [hs_norm(_l2(t.matrix, r)) for t in decomposition.terms]
    lhs = sum(math.sqrt(v) for v in l2_norms) ** 2
    rhs = decomposition.lam * sum(v / n for v, n in zip(l2_norms, norms))
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-9)


def shot_lower_bounds(p: ShotParams) -> tuple[float, float]:
    """Scaling values of the two shot-count lower bounds (constants unspecified).

    Returns (adaptive state-preparation shots, real-time dynamics shots):
    3^w (4R) ln(N) / eps^2 and 3^max(w,k) max(S, 4R) ln(N) / eps^2.
    """
    log_n = math.log(p.n_qubits)
    prep = 3.0**p.w * (4.0 * p.R) * log_n / p.eps_stat**2
    dyn = 3.0 ** max(p.w, p.k) * max(p.S, 4.0 * p.R) * log_n / p.eps_stat**2
    return prep, dyn

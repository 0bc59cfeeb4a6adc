"""Single-step evolution protocols behind one stepping interface.

Five protocols share the runner signature: first-order product stepping
("trotter1"), fixed-weight random compilation with Schatten-inf weights
("rc"), equal-weight random compilation ("equal"), the adaptive random
compiler re-deriving its sampling distribution from per-step moment
measurements ("arc"), and the exact reference ("exact").

Random steps sample a term index j from a probability vector p and apply
exp(-i H_j tau_j) with time slice tau_j = t / (N p_j); the channel average
then matches the exact step to first order in t/N for any valid p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .hamiltonians import Decomposition
from .linalg import HermitianOperator, QuantumState, evolve_unitary, fidelity
from .moments import EXACT, NoiseModel, moments_of, norm_finite_difference, norm_from_moments
from .rng import TrajectoryStream, trajectory_stream

PROTOCOL_NAMES = ("trotter1", "rc", "arc", "equal", "exact")
DETERMINISTIC_PROTOCOLS = frozenset({"trotter1", "exact"})

ZERO_WEIGHT_EPS = 1e-14


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    """Nonnegative weights over term indices, renormalized to sum 1 on construction."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probability vector must be a nonempty 1-d array")
        if not np.all(np.isfinite(p)):
            raise ValueError("probability vector has non-finite entries")
        if np.any(p < -1e-12):
            raise ValueError(f"negative probability {p.min()}")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if total <= 0:
            raise ValueError("probability vector sums to zero")
        p = p / total
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    def __len__(self) -> int:
        return len(self.p)

    @cached_property
    def _cdf(self) -> np.ndarray:
        return np.cumsum(self.p)

    def sample(self, u: float) -> int:
        """Inverse-CDF sample over the term order for a uniform u in [0, 1)."""
        idx = int(np.searchsorted(self._cdf, u, side="right"))
        return min(idx, len(self.p) - 1)


@dataclass(frozen=True)
class StepPlan:
    """Total evolution time t split into N equal steps."""

    total_time: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("step count must be >= 1")
        if not self.total_time > 0:
            raise ValueError("total time must be positive")

    @property
    def dt(self) -> float:
        return self.total_time / self.steps


@dataclass(eq=False)
class TrajectoryRecord:
    """Per-step log of one protocol run plus the final state.

    For sampled protocols `indices[k]` is the term applied at step k,
    `taus[k]` its time slice, and `probabilities[k]` the full distribution in
    effect; deterministic protocols leave those fields None. `fidelities[k]`
    compares the post-step state with the exact evolution (NaN when the exact
    reference is mixed).
    """

    protocol: str
    plan: StepPlan
    fidelities: np.ndarray
    final_state: QuantumState
    indices: np.ndarray | None = None
    taus: np.ndarray | None = None
    probabilities: np.ndarray | None = None

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelities[-1])


def optimal_distribution(
    djj_values, eps_zero: float = ZERO_WEIGHT_EPS, floor: float = 0.0
) -> ProbabilityDistribution:
    """Sampling weights p_j proportional to sqrt of each double-commutator norm.

    Entries at or below eps_zero get probability 0; if every entry is that
    small the distribution falls back to uniform. The optional floor lifts
    every entry to at least that probability; it defaults off because
    flooring without compensation breaks first-order channel matching.
    """
    d = np.asarray(djj_values, dtype=float)
    if np.any(d < 0):
        raise ValueError(f"negative weight input {d.min()}")
    if not 0.0 <= floor < 1.0 / d.size:
        raise ValueError(f"floor must be in [0, 1/{d.size})")
    active = d > eps_zero
    if not np.any(active):
        return ProbabilityDistribution(np.full(d.size, 1.0 / d.size))
    w = np.where(active, np.sqrt(np.clip(d, 0.0, None)), 0.0)
    p = ProbabilityDistribution(w)
    if floor > 0.0:
        # linear shrink keeps the sum at 1 with every entry >= floor
        p = ProbabilityDistribution((1.0 - d.size * floor) * p.p + floor)
    return p


def cost(djj_values, p) -> float:
    """Channel-mismatch cost sum_j d_j / p_j; infinite if some d_j > 0 gets p_j = 0."""
    d = np.asarray(djj_values, dtype=float)
    pv = p.p if isinstance(p, ProbabilityDistribution) else np.asarray(p, dtype=float)
    if d.shape != pv.shape:
        raise ValueError(f"length mismatch: {d.shape} vs {pv.shape}")
    total = 0.0
    for dj, pj in zip(d, pv):
        if dj > 0.0:
            if pj <= 0.0:
                return math.inf
            total += dj / pj
    return total


def step_trotter1(state: QuantumState, decomposition: Decomposition, plan: StepPlan) -> QuantumState:
    """One first-order product step: terms applied in listed order, term 1 first."""
    for term in decomposition.terms:
        state = evolve_unitary(state, term.eig, plan.dt)
    return state


def step_random(
    state: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    p: ProbabilityDistribution,
    rng: np.random.Generator,
) -> tuple[QuantumState, int, float]:
    """Sample a term by inverse CDF and apply exp(-i H_j tau_j), tau_j = dt / p_j."""
    if len(p) != len(decomposition):
        raise ValueError("distribution length does not match term count")
    j = p.sample(rng.random())
    tau = plan.dt / p.p[j]
    return evolve_unitary(state, decomposition.terms[j].eig, tau), j, tau


def run_exact(state0: QuantumState, full_h: HermitianOperator, plan: StepPlan) -> list[QuantumState]:
    """Exact evolution, returning the state after each of the N steps."""
    states = []
    state = state0
    for _ in range(plan.steps):
        state = evolve_unitary(state, full_h.eig, plan.dt)
        states.append(state)
    return states


def _reference_states(
    state0: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    exact_states: list[QuantumState] | None,
) -> list[QuantumState]:
    if exact_states is None:
        return run_exact(state0, decomposition.total_operator, plan)
    if len(exact_states) != plan.steps:
        raise ValueError(
            f"expected {plan.steps} exact states, got {len(exact_states)}"
        )
    return exact_states


def _step_fidelity(reference: QuantumState, state: QuantumState) -> float:
    if reference.is_pure:
        return fidelity(reference, state)
    return math.nan


def _as_stream(stream) -> TrajectoryStream:
    if isinstance(stream, TrajectoryStream):
        return stream
    return trajectory_stream(int(stream))


def run_trotter1(
    state0: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    *,
    exact_states: list[QuantumState] | None = None,
    **_unused,
) -> TrajectoryRecord:
    """First-order product formula for N steps."""
    exact = _reference_states(state0, decomposition, plan, exact_states)
    fids = np.empty(plan.steps)
    state = state0
    for k in range(plan.steps):
        state = step_trotter1(state, decomposition, plan)
        fids[k] = _step_fidelity(exact[k], state)
    return TrajectoryRecord("trotter1", plan, fids, state)


def _run_fixed_weights(
    protocol: str,
    p: ProbabilityDistribution,
    state0: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    stream,
    exact_states: list[QuantumState] | None,
) -> TrajectoryRecord:
    exact = _reference_states(state0, decomposition, plan, exact_states)
    stream = _as_stream(stream)
    n = plan.steps
    indices = np.empty(n, dtype=int)
    taus = np.empty(n)
    probs = np.tile(p.p, (n, 1))
    fids = np.empty(n)
    state = state0
    for k in range(n):
        rng = stream.step(k)
        state, j, tau = step_random(state, decomposition, plan, p, rng)
        indices[k], taus[k] = j, tau
        fids[k] = _step_fidelity(exact[k], state)
    return TrajectoryRecord(protocol, plan, fids, state, indices, taus, probs)


def run_rc(
    state0: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    *,
    stream=0,
    exact_states: list[QuantumState] | None = None,
    **_unused,
) -> TrajectoryRecord:
    """Random compilation with fixed weights p_j = ||H_j||_inf / lambda."""
    norms = np.asarray(decomposition.inf_norms)
    if norms.sum() <= 0:
        raise ValueError("all decomposition terms have zero norm")
    p = ProbabilityDistribution(norms)
    return _run_fixed_weights("rc", p, state0, decomposition, plan, stream, exact_states)


def run_equal_weight(
    state0: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    *,
    stream=0,
    exact_states: list[QuantumState] | None = None,
    **_unused,
) -> TrajectoryRecord:
    """Random compilation sampling every term with probability 1/L."""
    p = ProbabilityDistribution(np.full(len(decomposition), 1.0 / len(decomposition)))
    return _run_fixed_weights("equal", p, state0, decomposition, plan, stream, exact_states)


def run_arc(
    state0: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    *,
    noise: NoiseModel = EXACT,
    stream=0,
    exact_states: list[QuantumState] | None = None,
    fd_dt: float = 1e-3,
    prob_floor: float = 0.0,
    **_unused,
) -> TrajectoryRecord:
    """Adaptive random compilation: re-derive the sampling weights every step.

    Each step measures the four moments of every term on the trajectory's own
    current state (perturbed per the noise model), converts them to
    double-commutator norms, and samples from the optimal distribution. Mixed
    states take the finite-difference estimator with time offset fd_dt.
    """
    exact = _reference_states(state0, decomposition, plan, exact_states)
    stream = _as_stream(stream)
    n, L = plan.steps, len(decomposition)
    indices = np.empty(n, dtype=int)
    taus = np.empty(n)
    probs = np.empty((n, L))
    fids = np.empty(n)
    state = state0
    for k in range(n):
        rng = stream.step(k)
        if state.is_pure:
            dcn = [
                norm_from_moments(moments_of(term, state, noise, rng))
                for term in decomposition.terms
            ]
        else:
            dcn = [
                norm_finite_difference(term, state, fd_dt, noise, rng)
                for term in decomposition.terms
            ]
        p = optimal_distribution(dcn, floor=prob_floor)
        state, j, tau = step_random(state, decomposition, plan, p, rng)
        indices[k], taus[k] = j, tau
        probs[k] = p.p
        fids[k] = _step_fidelity(exact[k], state)
    return TrajectoryRecord("arc", plan, fids, state, indices, taus, probs)


def _run_exact_protocol(
    state0: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    *,
    exact_states: list[QuantumState] | None = None,
    **_unused,
) -> TrajectoryRecord:
    exact = _reference_states(state0, decomposition, plan, exact_states)
    fids = np.array([_step_fidelity(s, s) for s in exact])
    return TrajectoryRecord("exact", plan, fids, exact[-1])


_RUNNERS = {
    "trotter1": run_trotter1,
    "rc": run_rc,
    "equal": run_equal_weight,
    "arc": run_arc,
    "exact": _run_exact_protocol,
}


def run_protocol(
    name: str,
    state0: QuantumState,
    decomposition: Decomposition,
    plan: StepPlan,
    *,
    noise: NoiseModel = EXACT,
    stream=0,
    exact_states: list[QuantumState] | None = None,
) -> TrajectoryRecord:
    """Dispatch a protocol by name: trotter1 | rc | arc | equal | exact."""
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown protocol {name!r}; expected one of {PROTOCOL_NAMES}") from None
    return runner(
        state0, decomposition, plan, noise=noise, stream=stream, exact_states=exact_states
    )

"""Estimators of the double-commutator norm ||[H, [H, rho]]||.

Three routes to the same quantity: the direct matrix oracle, the pure-state
moment formula sqrt(6<H^2>^2 - 8<H><H^3> + 2<H^4>), and a mixed-state
finite-difference estimator assembled from six purity/overlap scalars.
Measurement statistics are simulated by perturbing each scalar with
independent additive Gaussian noise; no shot-level sampling is modeled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    HermitianOperator,
    QuantumState,
    commutator,
    evolve_unitary,
    hs_norm,
)


@dataclass
class NoiseModel:
    """Additive Gaussian perturbation applied independently to each measured scalar.

    std = 0 reproduces exact values bit-for-bit (no draws are consumed).
    A generator may be attached here or passed per call; per-call wins.
    """

    std: float = 0.0
    rng: np.random.Generator | None = None

    def __post_init__(self):
        if self.std < 0:
            raise ValueError("noise std must be nonnegative")

    def perturb(self, values: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.std == 0.0:
            return values
        gen = rng if rng is not None else self.rng
        if gen is None:
            raise ValueError("noise std > 0 requires a random generator")
        return values + gen.normal(0.0, self.std, size=values.shape)


EXACT = NoiseModel(0.0)


@dataclass(frozen=True)
class MomentSet:
    """First four moments <H>, <H^2>, <H^3>, <H^4> of one term on one state."""

    m1: float
    m2: float
    m3: float
    m4: float


def double_commutator_norm(h: HermitianOperator, state: QuantumState) -> float:
    """Exact ||[H, [H, rho]]|| by direct matrix arithmetic (the brute-force oracle)."""
    rho = state.density()
    if h.dim != state.dim:
        raise ValueError(f"dimension mismatch: operator {h.dim}, state {state.dim}")
    return hs_norm(commutator(h.matrix, commutator(h.matrix, rho)))


def moments_of(
    h: HermitianOperator,
    state: QuantumState,
    noise: NoiseModel = EXACT,
    rng: np.random.Generator | None = None,
) -> MomentSet:
    """Moments <H^k>, k = 1..4, of a pure state, each independently perturbed.

    Uses iterated operator-on-vector products rather than forming powers of H.
    """
    if not state.is_pure:
        raise ValueError("moment measurement needs a pure state; use the finite-difference path")
    if h.dim != state.dim:
        raise ValueError(f"dimension mismatch: operator {h.dim}, state {state.dim}")
    v = state.data
    raw = np.empty(4)
    w = v
    for k in range(4):
        w = h.matrix @ w
        raw[k] = np.vdot(v, w).real
    return MomentSet(*noise.perturb(raw, rng))


def norm_from_moments(m: MomentSet) -> float:
    """Pure-state formula sqrt(6 m2^2 - 8 m1 m3 + 2 m4), radicand clamped at 0."""
    radicand = 6.0 * m.m2**2 - 8.0 * m.m1 * m.m3 + 2.0 * m.m4
    return float(np.sqrt(max(radicand, 0.0)))


def _tr_product(a: np.ndarray, b: np.ndarray) -> np.longdouble:
    # Extended-precision Tr(ab): the six scalars cancel down to O(dt^4), so
    # float64 accumulation would dominate the estimator error at small dt.
    return np.einsum("ij,ji->", a.astype(np.clongdouble), b.astype(np.clongdouble)).real


def norm_finite_difference(
    h: HermitianOperator,
    rho: QuantumState,
    dt: float = 1e-3,
    noise: NoiseModel = EXACT,
    rng: np.random.Generator | None = None,
) -> float:
    """Mixed-state estimator ||rho1 + rho2 - 2 rho|| / dt^2 from six measured scalars.

    rho1 = exp(+iH dt) rho exp(-iH dt) and rho2 its time reverse; the three
    purities and three pairwise overlaps are each perturbed independently
    before assembly. Error falls off as O(dt^2).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if h.dim != rho.dim:
        raise ValueError(f"dimension mismatch: operator {h.dim}, state {rho.dim}")
    r0 = rho.density()
    r1 = evolve_unitary(rho, h.eig, -dt).density()
    r2 = evolve_unitary(rho, h.eig, dt).density()
    scalars = np.array(
        [
            _tr_product(r1, r1),
            _tr_product(r2, r2),
            _tr_product(r0, r0),
            _tr_product(r1, r2),
            _tr_product(r1, r0),
            _tr_product(r2, r0),
        ],
        dtype=np.longdouble,
    )
    weights = np.array([1.0, 1.0, 4.0, 2.0, -4.0, -4.0], dtype=np.longdouble)
    if noise.std > 0.0:
        scalars = noise.perturb(scalars.astype(float), rng).astype(np.longdouble)
    radicand = float(weights @ scalars)
    return float(np.sqrt(max(radicand, 0.0)) / dt**2)

import numpy as np
import pytest

from arcsim.hamiltonians import PAULI, HilbertStructure, annihilator
from arcsim.linalg import HermitianOperator, mixed_state, pure_state
from arcsim.moments import (
    MomentSet,
    NoiseModel,
    double_commutator_norm,
    moments_of,
    norm_finite_difference,
    norm_from_moments,
)
from arcsim.rng import trajectory_stream

SZ = PAULI["z"]
PLUS = pure_state(np.array([1, 1]) / np.sqrt(2))
ZERO = pure_state(np.array([1, 0], dtype=complex))


def random_hermitian(rng, dim, scale=1.0):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (m + m.conj().T) / 2)


def random_pure(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return pure_state(v / np.linalg.norm(v))


def random_mixed(rng, dim, rank=2):
    vecs = rng.normal(size=(rank, dim)) + 1j * rng.normal(size=(rank, dim))
    w = rng.uniform(0.2, 1.0, size=rank)
    w /= w.sum()
    rho = sum(wi * np.outer(v, v.conj()) / np.vdot(v, v).real for wi, v in zip(w, vecs))
    return mixed_state(rho)


class TestExactOracle:
    def test_eigenstate_vanishes(self):
        assert double_commutator_norm(HermitianOperator(SZ), ZERO) == pytest.approx(0.0)

    def test_plus_state(self):
        val = double_commutator_norm(HermitianOperator(SZ), PLUS)
        assert val == pytest.approx(2 * np.sqrt(2))

    def test_maximally_mixed_vanishes(self):
        rng = np.random.default_rng(0)
        h = random_hermitian(rng, 4)
        rho = mixed_state(np.eye(4) / 4)
        assert double_commutator_norm(h, rho) == pytest.approx(0.0, abs=1e-12)

    def test_scale_covariance(self):
        rng = np.random.default_rng(1)
        h = random_hermitian(rng, 4)
        psi = random_pure(rng, 4)
        base = double_commutator_norm(h, psi)
        scaled = double_commutator_norm(HermitianOperator(2.5 * h.matrix), psi)
        assert scaled == pytest.approx(2.5**2 * base, rel=1e-10)

    def test_vanishes_when_commuting(self):
        rng = np.random.default_rng(2)
        h = random_hermitian(rng, 4)
        # rho diagonal in H's eigenbasis commutes with H
        v = h.eig.eigenvectors
        rho = mixed_state((v * [0.4, 0.3, 0.2, 0.1]) @ v.conj().T)
        assert double_commutator_norm(h, rho) == pytest.approx(0.0, abs=1e-10)


class TestMoments:
    def test_sigma_z_on_plus(self):
        ms = moments_of(HermitianOperator(SZ), PLUS)
        assert (ms.m1, ms.m2, ms.m3, ms.m4) == pytest.approx((0, 1, 0, 1), abs=1e-12)

    def test_number_eigenstate(self):
        st = HilbertStructure(fock_dim=8)
        a = annihilator(st)
        n_op = HermitianOperator(a.conj().T @ a)
        ket5 = np.zeros(8, dtype=complex)
        ket5[5] = 1.0
        ms = moments_of(n_op, pure_state(ket5))
        assert (ms.m1, ms.m2, ms.m3, ms.m4) == pytest.approx((5, 25, 125, 625), rel=1e-12)

    def test_noisy_regression(self):
        # frozen replay of the seeded noise stream
        rng = trajectory_stream(12345, 1, 2).step(3)
        ms = moments_of(HermitianOperator(SZ), PLUS, NoiseModel(0.1), rng)
        assert ms.m1 == pytest.approx(0.0476242529156749, rel=1e-12)
        assert ms.m2 == pytest.approx(0.9749671178789511, rel=1e-12)
        assert ms.m3 == pytest.approx(0.03739973514868052, rel=1e-12)
        assert ms.m4 == pytest.approx(1.070985545893037, rel=1e-12)

    def test_zero_noise_is_bit_exact(self):
        rng = trajectory_stream(1).step(0)
        exact = moments_of(HermitianOperator(SZ), PLUS)
        noisy = moments_of(HermitianOperator(SZ), PLUS, NoiseModel(0.0), rng)
        assert (exact.m1, exact.m2, exact.m3, exact.m4) == (noisy.m1, noisy.m2, noisy.m3, noisy.m4)

    def test_mixed_state_rejected(self):
        with pytest.raises(ValueError):
            moments_of(HermitianOperator(SZ), mixed_state(np.eye(2) / 2))

    def test_cauchy_schwarz_on_noiseless_moments(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            h = random_hermitian(rng, 6)
            ms = moments_of(h, random_pure(rng, 6))
            assert ms.m2 >= ms.m1**2 - 1e-9
            assert ms.m4 >= ms.m2**2 - 1e-9


class TestNormFromMoments:
    def test_matches_plus_state_oracle(self):
        assert norm_from_moments(MomentSet(0, 1, 0, 1)) == pytest.approx(2 * np.sqrt(2))

    def test_eigenstate_moments(self):
        assert norm_from_moments(MomentSet(1, 1, 1, 1)) == 0.0

    def test_clamps_negative_radicand(self):
        assert norm_from_moments(MomentSet(0, 0, 0, -0.005)) == 0.0

    def test_oracle_equivalence_random(self):
        rng = np.random.default_rng(4)
        for dim in (2, 4, 8, 16):
            for _ in range(10):
                h = random_hermitian(rng, dim)
                psi = random_pure(rng, dim)
                exact = double_commutator_norm(h, psi)
                est = norm_from_moments(moments_of(h, psi))
                assert abs(est - exact) <= 1e-8 * (1 + exact)


class TestFiniteDifference:
    def test_plus_state(self):
        rho = mixed_state(np.outer([1, 1], [1, 1]) / 2)
        est = norm_finite_difference(HermitianOperator(SZ), rho, dt=1e-3)
        assert est == pytest.approx(2 * np.sqrt(2), rel=1e-5)

    def test_maximally_mixed(self):
        rho = mixed_state(np.eye(2) / 2)
        assert norm_finite_difference(HermitianOperator(SZ), rho, dt=1e-3) <= 1e-8

    def test_halving_dt_quarters_error(self):
        rng = np.random.default_rng(5)
        h = random_hermitian(rng, 4, scale=2.0)
        rho = random_mixed(rng, 4)
        exact = double_commutator_norm(h, rho)
        e1 = abs(norm_finite_difference(h, rho, dt=2e-3) - exact)
        e2 = abs(norm_finite_difference(h, rho, dt=1e-3) - exact)
        assert e1 / e2 == pytest.approx(4.0, rel=0.25)

    def test_convergence_slope(self):
        rng = np.random.default_rng(6)
        dts = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3])
        for _ in range(5):
            h = random_hermitian(rng, 4, scale=2.0)
            rho = random_mixed(rng, 4)
            exact = double_commutator_norm(h, rho)
            errs = [abs(norm_finite_difference(h, rho, dt=dt) - exact) for dt in dts]
            slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
            assert 1.7 <= slope <= 2.3

    def test_rejects_nonpositive_dt(self):
        rho = mixed_state(np.eye(2) / 2)
        with pytest.raises(ValueError):
            norm_finite_difference(HermitianOperator(SZ), rho, dt=0.0)

    def test_noise_perturbs_six_scalars(self):
        rho = mixed_state(np.outer([1, 1], [1, 1]) / 2)
        h = HermitianOperator(SZ)
        rng1 = trajectory_stream(7).step(0)
        rng2 = trajectory_stream(7).step(0)
        v1 = norm_finite_difference(h, rho, dt=1e-2, noise=NoiseModel(1e-6), rng=rng1)
        v2 = norm_finite_difference(h, rho, dt=1e-2, noise=NoiseModel(1e-6), rng=rng2)
        assert v1 == v2  # same stream, same perturbation
        drawn = trajectory_stream(7).step(0).normal(0, 1e-6, size=6)
        assert drawn.shape == (6,)


class TestNoiseModel:
    def test_rejects_negative_std(self):
        with pytest.raises(ValueError):
            NoiseModel(-0.1)

    def test_requires_generator_when_noisy(self):
        with pytest.raises(ValueError):
            NoiseModel(0.1).perturb(np.zeros(3))

    def test_attached_generator_used(self):
        nm = NoiseModel(0.5, rng=trajectory_stream(3).step(0))
        out = nm.perturb(np.zeros(4))
        expect = trajectory_stream(3).step(0).normal(0, 0.5, size=4)
        assert np.array_equal(out, expect)

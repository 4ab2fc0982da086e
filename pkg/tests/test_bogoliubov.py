"""Tests for Bogoliubov pairs, Bloch-Messiah reduction and the CZ synthesis."""

import numpy as np
import pytest
from conftest import fock_cz_heisenberg, random_chain_pair

from tfcluster.bogoliubov import (
    BlochMessiahError,
    BlochMessiahFactors,
    BogoliubovPair,
    compose,
    cz_bogoliubov,
    cz_symplectic,
    from_symplectic,
    reconstruct,
    reduce,
    symplectic_matrix,
    validate,
)
from tfcluster.cz import (
    CZ_PHI,
    CZ_PHI_PRIME,
    CZ_SQUEEZING,
    cz_layers,
    cz_sequence,
    frame_conjugated_cz,
    tms_as_parallel_squeezers,
)
from tfcluster.gaussian import is_symplectic, random_symplectic
from tfcluster.raman import PhasePair, RamanBS, RamanTMS, chain_bogoliubov, tms_bogoliubov

TOL = 1e-10


def residual(pair, other):
    return max(np.max(np.abs(pair.A - other.A)), np.max(np.abs(pair.B - other.B)))


def factor_invariants_hold(factors, tol=TOL):
    n = factors.U.shape[0]
    eye = np.eye(n)
    return (
        np.allclose(factors.A_D**2 - factors.B_D**2, eye, atol=tol)
        and np.allclose(factors.U @ factors.U.conj().T, eye, atol=tol)
        and np.allclose(factors.V @ factors.V.conj().T, eye, atol=tol)
        and np.all(np.diff(np.diag(factors.A_D)) <= tol)
        and np.all(np.diag(factors.B_D) >= 0)
    )


class TestPair:
    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            BogoliubovPair(np.eye(2), np.zeros((3, 3)))
        with pytest.raises(ValueError):
            BogoliubovPair(np.ones((2, 3)), np.ones((2, 3)))

    def test_immutable(self):
        pair = BogoliubovPair.identity(2)
        with pytest.raises(ValueError):
            pair.A[0, 0] = 2.0

    def test_embed(self):
        pair = tms_bogoliubov(RamanTMS(0.3)).embed(4, [3, 1])
        assert np.isclose(pair.A[3, 3], np.cosh(0.3))
        assert np.isclose(pair.B[3, 1], np.sinh(0.3))
        assert np.isclose(pair.A[0, 0], 1.0) and np.isclose(pair.A[2, 2], 1.0)
        with pytest.raises(ValueError):
            pair.embed(4, [0, 0, 1, 2])

    def test_then_needs_equal_size(self):
        with pytest.raises(ValueError):
            BogoliubovPair.identity(2).then(BogoliubovPair.identity(3))
        with pytest.raises(ValueError):
            compose()


class TestValidate:
    def test_identity_is_valid(self):
        report = validate(BogoliubovPair.identity(3))
        assert report and report.unitarity_residual == 0.0

    def test_identity_plus_identity_is_invalid(self):
        report = validate(BogoliubovPair(np.eye(2), np.eye(2)))
        assert not report
        assert np.isclose(report.unitarity_residual, 1.0)

    def test_two_mode_squeezer_is_valid(self):
        report = validate(tms_bogoliubov(RamanTMS(1.2, 0.4)))
        assert report and report.unitarity_residual < 1e-14

    def test_asymmetric_pair_flagged(self):
        report = validate(BogoliubovPair(np.sqrt(2) * np.eye(2), np.array([[0, 1], [0, 0]])))
        assert report.symmetry_residual > 0.5 and not report


class TestQuadraturePicture:
    def test_round_trip(self, rng):
        for n in (1, 2, 3):
            S = random_symplectic(n, rng).matrix
            pair = from_symplectic(S)
            assert validate(pair)
            assert np.allclose(symplectic_matrix(pair), S, atol=1e-12)

    def test_random_chain_is_symplectic(self, rng):
        for _ in range(20):
            assert is_symplectic(symplectic_matrix(random_chain_pair(rng, 3)))


class TestReduce:
    def test_identity(self):
        factors = reduce(BogoliubovPair.identity(3))
        assert np.allclose(factors.A_D, np.eye(3))
        assert np.allclose(factors.B_D, 0.0)
        assert np.allclose(factors.U, factors.V)
        assert residual(reconstruct(factors), BogoliubovPair.identity(3)) < 1e-14

    def test_cz_spectrum(self):
        factors = reduce(cz_bogoliubov())
        assert np.allclose(factors.A_D, np.sqrt(5) / 2 * np.eye(2), atol=TOL)
        assert np.allclose(factors.B_D, 0.5 * np.eye(2), atol=TOL)
        assert np.allclose(factors.squeezing, CZ_SQUEEZING)
        assert residual(reconstruct(factors), cz_bogoliubov()) < TOL

    def test_rejects_invalid(self):
        with pytest.raises(ValueError, match="valid"):
            reduce(BogoliubovPair(np.eye(2), np.eye(2)))

    def test_failed_reconstruction_is_reported(self, monkeypatch):
        import tfcluster.bogoliubov as module

        faulty = lambda factors: BogoliubovPair(factors.U @ factors.A_D @ factors.V.T, factors.U @ factors.B_D @ factors.V.T)
        monkeypatch.setattr(module, "reconstruct", faulty)
        with pytest.raises(BlochMessiahError):
            reduce(cz_bogoliubov())

    def test_random_pairs_round_trip(self, rng):
        worst = 0.0
        for k in range(500):
            pair = random_chain_pair(rng, 2 + k % 3, length=6, max_r=1.0)
            factors = reduce(pair)
            assert factor_invariants_hold(factors)
            worst = max(worst, residual(reconstruct(factors), pair))
        assert worst < TOL

    def test_deterministic(self, rng):
        pair = random_chain_pair(rng, 3)
        first, second = reduce(pair), reduce(pair)
        assert np.array_equal(first.U, second.U) and np.array_equal(first.V, second.V)

    def test_reduce_of_reconstruct_matches_factors(self, rng):
        """Factors survive reconstruct then reduce up to the diagonal phase gauge."""
        pair = random_chain_pair(rng, 3, max_r=1.0)
        factors = reduce(pair)
        again = reduce(reconstruct(factors))
        assert np.allclose(again.A_D, factors.A_D, atol=TOL)
        assert np.allclose(again.B_D, factors.B_D, atol=TOL)
        # columns agree up to a common phase per mode
        overlap = np.abs(np.diag(again.U.conj().T @ factors.U))
        assert np.allclose(overlap, 1.0, atol=1e-8)

    def test_degenerate_passive_block_is_canonical(self, rng):
        # three unsqueezed modes: U is free up to any 3x3 unitary
        Q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        factors = reduce(BogoliubovPair.passive(Q))
        again = reduce(reconstruct(factors))
        assert np.allclose(again.U, factors.U, atol=1e-10)
        assert np.allclose(again.V, factors.V, atol=1e-10)

    def test_gauge_of_passive_pair(self):
        theta = 0.7
        pair = BogoliubovPair.passive(np.exp(1j * theta) * np.array([[0, 1], [1, 0]]))
        factors = reduce(pair)
        for k in range(2):
            col = factors.U[:, k]
            lead = col[np.argmax(np.abs(col) > 1e-8)]
            assert abs(lead.imag) < 1e-12 and lead.real > 0


class TestCZGate:
    def test_quadrature_action(self):
        assert np.allclose(symplectic_matrix(cz_bogoliubov()), cz_symplectic(), atol=1e-12)
        assert np.allclose(
            cz_symplectic(),
            [[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [1, 0, 0, 1]],
        )

    def test_valid(self):
        assert validate(cz_bogoliubov(), tol=1e-14)

    def test_matches_fock_heisenberg_evolution(self):
        """Fit U^dag a_k U for U = exp(i q1 q2) on low number states."""
        heis, (a1, a2) = fock_cz_heisenberg()
        pair = cz_bogoliubov()
        for k in range(2):
            predicted = pair.A[k, 0] * a1 + pair.A[k, 1] * a2 + pair.B[k, 0] * a1.T + pair.B[k, 1] * a2.T
            assert np.allclose(heis[k], predicted, atol=1e-10)

    def test_applied_twice_doubles_weight(self):
        twice = cz_bogoliubov().then(cz_bogoliubov())
        assert twice.allclose(cz_bogoliubov(2.0), atol=1e-12)
        assert np.isclose(symplectic_matrix(twice)[1, 2], 2.0)


class TestCZSynthesis:
    def test_angle_constants(self):
        assert np.isclose(np.degrees(CZ_PHI), 31.717, atol=1e-3)
        assert np.isclose(np.degrees(CZ_PHI_PRIME), 13.283, atol=1e-3)
        assert np.isclose(CZ_PHI + CZ_PHI_PRIME, np.pi / 4)
        assert np.isclose(np.sinh(CZ_SQUEEZING), 0.5)

    def test_sequence_composes_to_cz(self):
        seq = cz_sequence()
        assert residual(seq.bogoliubov(), cz_bogoliubov()) < TOL
        assert np.allclose(symplectic_matrix(seq.bogoliubov()), cz_symplectic(), atol=1e-12)

    def test_three_memory_operations_without_leftover_phases(self):
        seq = cz_sequence()
        kinds = [type(op) for op in seq.raman_ops]
        assert kinds == [RamanBS, RamanTMS, RamanBS]
        assert np.isclose(np.mod(seq.terminal_phases.theta1, 2 * np.pi), 0.0)
        assert np.isclose(np.mod(seq.terminal_phases.theta2, 2 * np.pi), 0.0)

    def test_operation_parameters(self):
        first, tms, last = cz_sequence().raman_ops
        assert first == last
        assert np.isclose(first.phi, CZ_PHI_PRIME) and np.isclose(first.theta, 3 * np.pi / 2)
        assert np.isclose(tms.r, CZ_SQUEEZING) and np.isclose(tms.psi, np.pi / 2)

    def test_reported_coupling_and_squeezing(self):
        seq = cz_sequence()
        assert np.isclose(seq.coupling, 0.052786, atol=1e-6)
        assert 0.0520 <= seq.coupling <= 0.0536
        assert np.isclose(seq.squeezing_db, 20 * np.arcsinh(0.5) / np.log(10))
        assert 4.15 <= seq.squeezing_db <= 4.21

    def test_layers_compose_to_cz(self):
        assert residual(chain_bogoliubov(cz_layers()), cz_bogoliubov()) < TOL

    @pytest.mark.parametrize("frames", [(0.0, np.pi / 2), (np.pi / 2, 0.0), (0.3, -1.1)])
    def test_frame_conjugated_sequence(self, frames):
        seq = cz_sequence(frames)
        assert residual(seq.bogoliubov(), frame_conjugated_cz(frames)) < TOL

    def test_tms_becomes_parallel_squeezers(self):
        pair = tms_as_parallel_squeezers(0.6)
        assert np.allclose(pair.A, np.cosh(0.6) * np.eye(2), atol=1e-12)
        assert np.allclose(pair.B, np.sinh(0.6) * np.eye(2), atol=1e-12)

    def test_factors_type(self):
        factors = reduce(cz_sequence().bogoliubov())
        assert isinstance(factors, BlochMessiahFactors)
        assert factor_invariants_hold(factors)

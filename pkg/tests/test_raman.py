"""Tests for the Raman beam splitter, two-mode squeezer and phase commutation."""

import numpy as np
import pytest
from conftest import random_two_mode_op

from tfcluster.bogoliubov import BogoliubovPair, compose, validate
from tfcluster.gaussian import apply, is_symplectic, vacuum
from tfcluster.raman import (
    PhasePair,
    RamanBS,
    RamanTMS,
    bogoliubov,
    bs_bogoliubov,
    chain_bogoliubov,
    commute_phases_bs,
    commute_phases_tms,
    op_symplectic,
    phase_bogoliubov,
    rewrite_chain,
    to_symplectic,
    tms_bogoliubov,
)

IDENTITY_TOL = 1e-12


def real_bs(phi):
    return bs_bogoliubov(RamanBS(phi, 0.0))


def real_tms(r):
    return tms_bogoliubov(RamanTMS(r, 0.0))


class TestOperationTypes:
    """Parameter handling of the operation value types."""

    def test_negative_squeezing_folds_into_phase(self):
        op = RamanTMS(-0.4, 0.3)
        assert op.r == pytest.approx(0.4)
        assert op.psi == pytest.approx(0.3 + np.pi)

    def test_folded_form_is_same_transformation(self):
        # B = e^{i psi} sinh r antidiag: (-r, psi) and (r, psi + pi) agree
        folded = RamanTMS(-0.4, 0.3)
        assert np.allclose(bogoliubov(folded).B[0, 1], np.sinh(-0.4) * np.exp(0.3j))

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            RamanBS(bad)
        with pytest.raises(ValueError):
            RamanTMS(0.1, bad)
        with pytest.raises(ValueError):
            PhasePair(bad, 0.0)

    def test_coupling_and_db(self):
        assert RamanBS(np.pi / 6).coupling == pytest.approx(0.25)
        assert RamanTMS(np.log(10) / 2).db == pytest.approx(10.0)

    def test_phase_pair_arithmetic(self):
        total = PhasePair(0.1, 0.2) + PhasePair(0.3, -0.5)
        assert (total.theta1, total.theta2) == pytest.approx((0.4, -0.3))
        neg = -PhasePair(0.1, 0.2)
        assert (neg.theta1, neg.theta2) == pytest.approx((-0.1, -0.2))

    def test_unknown_operation_rejected(self):
        with pytest.raises(TypeError):
            bogoliubov("BS")
        with pytest.raises(TypeError):
            rewrite_chain([RamanBS(0.1), 3.0])


class TestBeamSplitter:
    def test_zero_angle_is_identity(self):
        assert bs_bogoliubov(RamanBS(0.0, 1.3)).allclose(BogoliubovPair.identity(2), atol=IDENTITY_TOL)

    def test_pi_angle_negates_both_modes(self):
        pair = bs_bogoliubov(RamanBS(np.pi, 0.0))
        assert np.allclose(pair.A, -np.eye(2), atol=IDENTITY_TOL)
        assert np.allclose(pair.B, 0.0)

    def test_factorizes_through_control_phase(self):
        theta = np.pi / 3
        factored = compose(
            phase_bogoliubov(PhasePair(0.0, -theta)),
            real_bs(np.pi / 4),
            phase_bogoliubov(PhasePair(0.0, theta)),
        )
        assert bs_bogoliubov(RamanBS(np.pi / 4, theta)).allclose(factored, atol=IDENTITY_TOL)

    def test_quarter_turn_swaps_quadratures(self):
        # a1 -> a2 and a2 -> -a1 at phi = pi/2
        S = to_symplectic(real_bs(np.pi / 2)).matrix
        expected = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
        assert np.allclose(S, expected, atol=IDENTITY_TOL)

    def test_passive_and_valid(self, rng):
        for _ in range(50):
            pair = bs_bogoliubov(RamanBS(*rng.uniform(-np.pi, np.pi, 2)))
            assert validate(pair, tol=IDENTITY_TOL)
            assert np.allclose(pair.B, 0.0)


class TestTwoModeSqueezer:
    def test_zero_squeezing_is_identity(self):
        assert tms_bogoliubov(RamanTMS(0.0, 2.0)).allclose(BogoliubovPair.identity(2), atol=IDENTITY_TOL)

    def test_cz_strength_matrices(self):
        pair = tms_bogoliubov(RamanTMS(np.arcsinh(0.5), 0.0))
        assert np.allclose(pair.A, np.sqrt(5) / 2 * np.eye(2), atol=IDENTITY_TOL)
        assert np.allclose(pair.B, [[0, 0.5], [0.5, 0]], atol=IDENTITY_TOL)

    def test_symplectic(self, rng):
        for _ in range(50):
            S = op_symplectic(RamanTMS(rng.uniform(0, 2), rng.uniform(0, 2 * np.pi)))
            assert is_symplectic(S.matrix)

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 2.0])
    def test_correlated_position_difference(self, r):
        state = apply(vacuum(2), op_symplectic(RamanTMS(r, 0.0)), [0, 1])
        diff = np.array([1, 0, -1, 0])
        assert np.isclose(diff @ state.cov @ diff, np.exp(-2 * r), atol=1e-12)

    def test_invalid_pair_not_converted(self):
        with pytest.raises(ValueError, match="invalid"):
            to_symplectic(BogoliubovPair(np.eye(2), np.eye(2)))


class TestConversion:
    def test_identity(self):
        assert np.allclose(to_symplectic(BogoliubovPair.identity(3)).matrix, np.eye(6))

    def test_composition_is_matrix_product(self, rng):
        first, second = random_two_mode_op(rng), random_two_mode_op(rng)
        composed = to_symplectic(chain_bogoliubov([first, second])).matrix
        product = op_symplectic(second).matrix @ op_symplectic(first).matrix
        assert np.allclose(composed, product, atol=1e-12)

    def test_empty_chain_is_identity(self):
        assert chain_bogoliubov([]).allclose(BogoliubovPair.identity(2))


class TestPhaseCommutation:
    """Phase shifts before an interaction equal a retuned interaction followed by the same phases."""

    def test_trivial_phases(self):
        bs, out = commute_phases_bs(PhasePair(), 0.3)
        assert bs.theta == 0.0 and out == PhasePair()
        tms, out = commute_phases_tms(PhasePair(), 0.3)
        assert tms.psi == 0.0 and out == PhasePair()

    def test_bs_quarter_phase(self):
        phases = PhasePair(np.pi / 2, 0.0)
        bs, out = commute_phases_bs(phases, np.pi / 4)
        assert bs.theta == pytest.approx(np.pi / 2)
        lhs = compose(phase_bogoliubov(phases), real_bs(np.pi / 4))
        rhs = compose(bs_bogoliubov(bs), phase_bogoliubov(out))
        assert lhs.allclose(rhs, atol=IDENTITY_TOL)

    def test_tms_eighth_phases(self):
        phases = PhasePair(np.pi / 4, np.pi / 4)
        tms, out = commute_phases_tms(phases, 0.7)
        assert tms.psi == pytest.approx(-np.pi / 2)
        assert out == phases
        lhs = compose(phase_bogoliubov(phases), real_tms(0.7))
        rhs = compose(tms_bogoliubov(tms), phase_bogoliubov(out))
        assert lhs.allclose(rhs, atol=IDENTITY_TOL)

    def test_random_triples(self, rng):
        worst = 0.0
        for _ in range(1000):
            phases = PhasePair(*rng.uniform(-np.pi, np.pi, 2))
            phi, r = rng.uniform(-np.pi, np.pi), rng.uniform(0, 2)
            bs, out_bs = commute_phases_bs(phases, phi)
            tms, out_tms = commute_phases_tms(phases, r)
            assert out_bs == phases and out_tms == phases
            for real, raman in ((real_bs(phi), bs_bogoliubov(bs)), (real_tms(r), tms_bogoliubov(tms))):
                lhs = compose(phase_bogoliubov(phases), real)
                rhs = compose(raman, phase_bogoliubov(phases))
                worst = max(worst, np.max(np.abs(lhs.A - rhs.A)), np.max(np.abs(lhs.B - rhs.B)))
        assert worst < IDENTITY_TOL


class TestRewriteChain:
    def test_phase_bs_chain_collapses(self, rng):
        chain = []
        for _ in range(5):
            chain += [PhasePair(*rng.uniform(-np.pi, np.pi, 2)), RamanBS(rng.uniform(-1, 1), 0.0)]
        ops, terminal = rewrite_chain(chain)
        assert all(isinstance(op, RamanBS) for op in ops) and len(ops) == 5
        assert chain_bogoliubov(ops + [terminal]).allclose(chain_bogoliubov(chain), atol=1e-10)

    def test_random_mixed_chains(self, rng):
        for _ in range(200):
            chain = [random_two_mode_op(rng, max_r=1.5) for _ in range(rng.integers(1, 12))]
            ops, terminal = rewrite_chain(chain)
            assert not any(isinstance(op, PhasePair) for op in ops)
            rebuilt = chain_bogoliubov(ops + [terminal])
            assert rebuilt.allclose(chain_bogoliubov(chain), atol=1e-10)

    def test_terminal_phases_are_the_sum_of_phase_layers(self):
        chain = [PhasePair(0.1, 0.2), RamanTMS(0.3), PhasePair(0.4, -0.1), RamanBS(0.2, 1.0)]
        _, terminal = rewrite_chain(chain)
        assert (terminal.theta1, terminal.theta2) == pytest.approx((0.5, 0.1))

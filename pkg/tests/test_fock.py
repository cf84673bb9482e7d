import math

import numpy as np
import pytest
from scipy.special import gammainc

from fanstate.coherent import CoherentSuperposition, coherent_overlap, norm_sq
from fanstate.fock import (
    JointState,
    SeriesDivergenceError,
    TruncationError,
    W_MATRIX,
    apply_U_closed,
    apply_U_series,
    coherent_fock,
    default_dim,
    oracle_protocol,
    project_outcome,
    superposition_to_fock,
    truncation_tail,
)
from fanstate.protocol import AtomPreparation, DetectionOutcome, ProtocolStep, fan_schedule, run_protocol

from .conftest import fock_coeffs

M, P = DetectionOutcome.MINUS, DetectionOutcome.PLUS
GROUND = AtomPreparation.basis(M)


def random_joint(rng, D):
    return JointState(rng.normal(size=D) + 1j * rng.normal(size=D), rng.normal(size=D) + 1j * rng.normal(size=D))


class TestCoherentFock:
    def test_vacuum(self):
        v = coherent_fock(0, 8)
        assert v[0] == 1 and not v[1:].any()

    def test_norm_alpha_two(self):
        v = coherent_fock(2, 60)
        assert np.vdot(v, v).real == pytest.approx(1, abs=1e-15)

    def test_matches_direct_expansion(self):
        np.testing.assert_allclose(coherent_fock(1.5 - 0.7j, 40), fock_coeffs(1.5 - 0.7j, 40), atol=1e-15)

    def test_overlap(self):
        a, b = 1.2 + 0.5j, -0.3 + 1.1j
        got = np.vdot(coherent_fock(b, 60), coherent_fock(a, 60))
        assert got == pytest.approx(coherent_overlap(b, a), abs=1e-14)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            coherent_fock(1, 0)


class TestTail:
    def test_vacuum(self):
        assert truncation_tail(0, 1) == 0

    def test_alpha_two(self):
        assert truncation_tail(2, 60) < 1e-15

    @pytest.mark.parametrize("r,D", [(1.0, 5), (2.0, 10), (2.5, 30), (5.0, 40)])
    def test_against_incomplete_gamma(self, r, D):
        # P(N >= D) for N ~ Poisson(r^2) is the regularized lower incomplete gamma P(D, r^2)
        assert truncation_tail(r, D) == pytest.approx(gammainc(D, r * r), rel=1e-10)

    def test_monotone(self):
        tails = [truncation_tail(2.5, D) for D in range(1, 60)]
        assert all(a >= b for a, b in zip(tails, tails[1:]))

    def test_default_dim_budget(self):
        for r in np.linspace(0, 6, 25):
            assert truncation_tail(r, default_dim(r)) < 1e-12


class TestEvolution:
    def test_identity_at_zero_and_two_pi(self, rng):
        psi = random_joint(rng, 20)
        np.testing.assert_array_equal(apply_U_closed(psi, 0.0).as_vector(), psi.as_vector())
        np.testing.assert_allclose(apply_U_closed(psi, 2 * math.pi).as_vector(), psi.as_vector(), atol=1e-12)

    def test_unitary(self, rng):
        psi = random_joint(rng, 30)
        for tau in np.linspace(0, 4 * math.pi, 17):
            assert apply_U_closed(psi, tau).norm_sq() == pytest.approx(psi.norm_sq(), rel=1e-12)

    def test_periodic(self, rng):
        psi = random_joint(rng, 30)
        for tau in (0.3, 1.7, 5.0):
            np.testing.assert_allclose(
                apply_U_closed(psi, tau + 2 * math.pi).as_vector(), apply_U_closed(psi, tau).as_vector(), atol=1e-12
            )

    def test_w_powers(self):
        for ell in range(1, 11):
            np.testing.assert_array_equal(np.linalg.matrix_power(W_MATRIX, ell), 2 ** (ell - 1) * W_MATRIX)

    def test_series_zero_time(self, rng):
        psi = random_joint(rng, 10)
        np.testing.assert_array_equal(apply_U_series(psi, 0.0, terms=3).as_vector(), psi.as_vector())

    def test_series_matches_closed(self, rng):
        for _ in range(5):
            psi = random_joint(rng, 40)
            tau = rng.uniform(0, 2 * math.pi)
            diff = apply_U_series(psi, tau).as_vector() - apply_U_closed(psi, tau).as_vector()
            assert np.max(np.abs(diff)) < 1e-10

    def test_series_divergence_guard(self, rng):
        with pytest.raises(SeriesDivergenceError):
            apply_U_series(random_joint(rng, 40), 3.0, terms=2)


class TestProjection:
    def test_identity_passage(self):
        field = coherent_fock(1.1, 30)
        psi = apply_U_closed(JointState.product(GROUND, field), 0.0)
        np.testing.assert_array_equal(project_outcome(psi, M), field)

    def test_odd_cat(self):
        D = 60
        field = coherent_fock(1.3, D)
        psi = apply_U_closed(JointState.product(GROUND, field), math.pi)
        expected = 0.5 * (-fock_coeffs(1.3, D) + fock_coeffs(-1.3, D))
        np.testing.assert_allclose(project_outcome(psi, P), expected, atol=1e-14)

    def test_completeness(self, rng):
        psi = random_joint(rng, 25)
        parts = sum(np.vdot(v, v).real for v in (project_outcome(psi, s) for s in (M, P)))
        assert parts == pytest.approx(psi.norm_sq(), rel=1e-14)


class TestOracleProtocol:
    def test_no_steps(self):
        final, norms = oracle_protocol(0.8, [], 40)
        np.testing.assert_allclose(final, coherent_fock(0.8, 40))
        assert norms == []

    def test_fan_two_atoms(self):
        _, norms = oracle_protocol(1.0, fan_schedule(2), 60)
        assert norms[-1] == pytest.approx(0.25 * (1 + math.exp(-2) + 2 * math.exp(-1) * math.cos(1)), abs=1e-14)

    def test_agrees_with_analytic(self, rng):
        steps = [ProtocolStep(AtomPreparation.normalized(0.6, 0.8j), 2.2, P), ProtocolStep(GROUND, 0.4, M)]
        final, norms = oracle_protocol(1.8 - 0.5j, steps, 60)
        run = run_protocol(1.8 - 0.5j, steps)
        np.testing.assert_allclose(norms, run.per_step_norm_sq, atol=1e-12)
        np.testing.assert_allclose(final, superposition_to_fock(run.final_state, 60), atol=1e-12)

    def test_budget(self):
        with pytest.raises(TruncationError):
            oracle_protocol(4.0, fan_schedule(2), 20)


def test_embedding_norm():
    state = CoherentSuperposition.from_terms([(0.3, 1.5), (0.6j, -1 + 0.5j), (-0.2, 2j)])
    v = superposition_to_fock(state, default_dim(2.0))
    assert np.vdot(v, v).real == pytest.approx(norm_sq(state), abs=1e-8)

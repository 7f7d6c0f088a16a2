"""Unit tests for the deviation functional, negativity, and rate metrics.

The deviation functional has hand-derived closed forms for the two n=3 code
families under the weighted Kraus set (only pairs whose string product is a
logical operator survive the projection):

    delta_c(repetition) = 4 (p0 p3 + 3 p1 p2)
    delta_c(rotated)    = 4 (p0 p1 + 2 p1 p2 + p2 p3)

These are independent of the matrix pipeline and pin it to 1e-10 here.
"""

import math

import numpy as np
import pytest
from conftest import random_density, random_profile
from hypothesis import given, settings
from hypothesis import strategies as st

from aqec import (
    ConsistencyError,
    DimSplit,
    RateProfile,
    closed_form_delta,
    deviation,
    error_probabilities,
    initial_rate,
    kl_check,
    kraus_set,
    negativity,
    probe_state,
    regime_inequality,
    repetition_code,
    rotated_code,
)
from aqec.channel import pauli_z_string
from aqec.metrics import DeviationReport, RateEstimate

REPETITION_PAIRS = {(0, 7), (7, 0), (1, 6), (6, 1), (2, 5), (5, 2), (3, 4), (4, 3)}
ROTATED_PAIRS = {(0, 1), (1, 0), (2, 4), (4, 2), (3, 5), (5, 3), (6, 7), (7, 6)}


def closed_rep(p):
    return 4.0 * (p[0] * p[3] + 3.0 * p[1] * p[2])


def closed_rot(p):
    return 4.0 * (p[0] * p[1] + 2.0 * p[1] * p[2] + p[2] * p[3])


class TestDeviation:
    @pytest.mark.parametrize("tag", range(6))
    def test_repetition_closed_form(self, tag):
        profile = random_profile(3, tag)
        t = 0.07 + 0.09 * tag
        kset = kraus_set(profile, t)
        report = deviation(repetition_code(3).projector, kset)
        assert abs(report.delta_c - closed_rep(kset.probabilities.p)) <= 1e-10

    @pytest.mark.parametrize("tag", range(6))
    def test_rotated_closed_form(self, tag):
        profile = random_profile(3, tag)
        t = 0.05 + 0.08 * tag
        kset = kraus_set(profile, t)
        report = deviation(rotated_code(3).projector, kset)
        assert abs(report.delta_c - closed_rot(kset.probabilities.p)) <= 1e-10

    def test_pair_norms(self, profile3):
        # each violating pair contributes exactly 2 p_a p_b
        kset = kraus_set(profile3, 0.1)
        p = kset.probabilities.p
        report = deviation(repetition_code(3).projector, kset)
        norms = report.lambda_norms
        assert np.isclose(norms[0, 7], 2.0 * p[0] * p[3], atol=1e-12)
        assert np.isclose(norms[7, 0], 2.0 * p[0] * p[3], atol=1e-12)
        assert np.isclose(norms[2, 5], 2.0 * p[1] * p[2], atol=1e-12)

    def test_violating_pairs(self, profile3):
        kset = kraus_set(profile3, 0.1)
        rep = deviation(repetition_code(3).projector, kset)
        rot = deviation(rotated_code(3).projector, kset)
        assert set(rep.violating_pairs) == REPETITION_PAIRS
        assert set(rot.violating_pairs) == ROTATED_PAIRS

    def test_reduced_state_scaling(self, profile3):
        # M -> M/2 scales each Lambda norm by 1/16 (four factors of M,
        # minus one trace normalization squared)
        kset = kraus_set(profile3, 0.2)
        code = repetition_code(3)
        on_projector = deviation(code.projector, kset).delta_c
        on_reduced = deviation(code.reduced_state(), kset).delta_c
        assert np.isclose(on_reduced, on_projector / 16.0, atol=1e-12)

    def test_identity_channel_is_exact(self, profile3):
        report = deviation(repetition_code(3).projector, kraus_set(profile3, 0.0))
        assert report.delta_c <= 1e-15
        assert report.violating_pairs == ()

    def test_alpha_diagonal_values(self, profile3):
        # alpha_ii = p_i tr(P Z_S P Z_S)/tr(P); identity pair gives p_0
        kset = kraus_set(profile3, 0.1)
        report = deviation(repetition_code(3).projector, kset)
        assert np.isclose(report.alpha[0, 0].real, kset.probabilities.p[0], atol=1e-12)

    def test_rejects_non_hermitian_state(self, profile3):
        state = np.zeros((8, 8), dtype=complex)
        state[0, 1] = 1.0
        with pytest.raises(ValueError, match="Hermitian"):
            deviation(state, kraus_set(profile3, 0.1))

    def test_rejects_dimension_mismatch(self, profile4):
        with pytest.raises(ValueError, match="does not match"):
            deviation(repetition_code(3).projector, kraus_set(profile4, 0.1))

    def test_report_invariants_enforced(self):
        alpha = np.eye(2, dtype=complex)
        norms = np.zeros((2, 2))
        with pytest.raises(ConsistencyError, match="pair norms"):
            DeviationReport(
                alpha=alpha, lambda_norms=norms, delta_c=1.0, violating_pairs=()
            )
        bad_alpha = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ConsistencyError, match="Hermitian"):
            DeviationReport(
                alpha=bad_alpha, lambda_norms=norms, delta_c=0.0, violating_pairs=()
            )


class TestKLCheck:
    def test_repetition_corrects_single_z(self):
        errors = np.stack([pauli_z_string(3, s) for s in [(), (0,), (1,), (2,)]])
        result = kl_check(repetition_code(3), errors)
        assert result.ok
        assert result.max_violation <= 1e-10

    def test_rotated_gives_up_single_z_on_first_qubit(self):
        # Z on the z-basis qubit acts diagonally with opposite signs on the
        # two words, so the single-error set is no longer exactly corrected
        errors = np.stack([pauli_z_string(3, s) for s in [(), (0,), (1,), (2,)]])
        result = kl_check(rotated_code(3), errors)
        assert not result.ok
        assert result.max_violation > 0.1

    def test_full_weight_string_breaks_repetition(self):
        errors = np.stack([pauli_z_string(3, s) for s in [(), (0, 1, 2)]])
        result = kl_check(repetition_code(3), errors)
        assert not result.ok
        assert result.max_violation > 0.1

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="error stack"):
            kl_check(repetition_code(3), np.eye(8))


class TestNegativity:
    def test_probe_state_is_maximally_entangled(self):
        probe = probe_state(repetition_code(3))
        assert np.isclose(negativity(probe.rho, probe.split), 1.0, atol=1e-10)

    def test_product_state_is_zero(self, rng):
        rho = np.kron(random_density(2, rng), random_density(4, rng))
        assert negativity(rho, DimSplit(2, 4)) <= 1e-10

    def test_axis_symmetry(self):
        probe = probe_state(rotated_code(3))
        na = negativity(probe.rho, probe.split, which="a")
        nb = negativity(probe.rho, probe.split, which="b")
        assert np.isclose(na, nb, atol=1e-10)

    def test_invariant_under_local_unitaries(self, rng):
        from aqec import haar_unitary, kron

        probe = probe_state(repetition_code(3))
        u = kron(haar_unitary(2, rng), haar_unitary(8, rng))
        moved = u @ probe.rho @ u.conj().T
        assert np.isclose(
            negativity(moved, probe.split), negativity(probe.rho, probe.split),
            atol=1e-10,
        )

    def test_route_disagreement_raises(self):
        # the singular route subtracts a literal unit trace, so a trace-2
        # input drives the two routes apart and must be rejected
        probe = probe_state(repetition_code(3))
        with pytest.raises(ConsistencyError, match="routes disagree"):
            negativity(2.0 * probe.rho, probe.split)


class TestInitialRate:
    def test_exact_on_linear_curve(self):
        est = initial_rate(lambda t: 3.0 - 2.0 * t, h=1e-3)
        assert np.isclose(est.forward, -2.0, atol=1e-9)
        assert est.h == 1e-3

    def test_richardson_cancels_quadratic_term(self):
        est = initial_rate(lambda t: t + 5.0 * t * t, h=5e-3)
        assert abs(est.richardson - 1.0) < 1e-9
        assert abs(est.forward - 1.0) > 1e-2

    def test_step_halving_check_fires(self):
        with pytest.raises(ConsistencyError, match="step-halving"):
            initial_rate(lambda t: math.sqrt(t), h=1e-2)

    def test_check_can_be_disabled(self):
        est = initial_rate(lambda t: math.sqrt(t), h=1e-2, check=False)
        assert isinstance(est, RateEstimate)

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError, match="positive"):
            initial_rate(lambda t: t, h=0.0)

    def test_delta_curve_rate_matches_closed_form(self, profile3):
        # d/dt of 4(p0 p3 + 3 p1 p2) at 0+ via the closed forms themselves
        def curve(t):
            p = error_probabilities(profile3, t).p
            return closed_rep(p)

        est = initial_rate(curve, h=1e-4)
        h = 1e-7
        brute = (closed_rep(error_probabilities(profile3, h).p)) / h
        assert np.isclose(est.forward, brute, rtol=1e-2)


class TestClosedFormDelta:
    def test_values_at_reference_point(self, profile3):
        p = error_probabilities(profile3, 0.1)
        assert np.isclose(closed_form_delta("standard", p), 0.7998380325014176, atol=1e-12)
        assert np.isclose(closed_form_delta("rotated", p), 0.5730423542555328, atol=1e-12)

    def test_accepts_plain_arrays(self):
        p = np.array([0.25, 0.25, 0.25, 0.25])
        assert np.isclose(closed_form_delta("standard", p), 2.0 * (0.25 + 0.75))

    def test_rejects_wrong_size(self):
        with pytest.raises(ValueError, match="n = 3"):
            closed_form_delta("standard", np.ones(5) / 5.0)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="code_kind"):
            closed_form_delta("other", np.array([1.0, 0.0, 0.0, 0.0]))


class TestRegimeInequality:
    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=4, max_size=4))
    @settings(max_examples=100, deadline=None)
    def test_three_qubit_sides_match_closed_forms(self, raw):
        # at n=3 the general-n sides reduce termwise to the closed forms
        total = sum(raw) or 1.0
        p = np.array([v / total for v in raw])
        report = regime_inequality(p)
        assert abs(report.lhs - closed_form_delta("standard", p)) <= 1e-13
        assert abs(report.rhs - closed_form_delta("rotated", p)) <= 1e-13

    def test_verdict_flags_lhs_majority(self):
        report = regime_inequality(np.array([0.5, 0.0, 0.0, 0.5]))
        assert report.rotated_optimal
        report = regime_inequality(np.array([0.5, 0.5, 0.0, 0.0]))
        assert not report.rotated_optimal

    def test_four_qubit_sides(self):
        # n=4: lhs = 2 sqrt(p0 p4) + 8 sqrt(p1 p3) + 6 p2,
        #      rhs = 2 (sqrt(p0 p1) + 3 sqrt(p1 p2) + 3 sqrt(p2 p3) + sqrt(p3 p4))
        p = np.array([0.4, 0.1, 0.2, 0.05, 0.25])
        report = regime_inequality(p)
        lhs = 2 * math.sqrt(p[0] * p[4]) + 8 * math.sqrt(p[1] * p[3]) + 6 * p[2]
        rhs = 2 * (
            math.sqrt(p[0] * p[1])
            + 3 * math.sqrt(p[1] * p[2])
            + 3 * math.sqrt(p[2] * p[3])
            + math.sqrt(p[3] * p[4])
        )
        assert np.isclose(report.lhs, lhs, atol=1e-13)
        assert np.isclose(report.rhs, rhs, atol=1e-13)

    def test_correlated_regime_at_reference_rates(self, profile3):
        report = regime_inequality(error_probabilities(profile3, 0.1))
        assert report.rotated_optimal

    def test_independent_regime(self):
        profile = RateProfile(n=3, gamma=(1.0, 1.0, 0.1))
        report = regime_inequality(error_probabilities(profile, 0.1))
        assert not report.rotated_optimal

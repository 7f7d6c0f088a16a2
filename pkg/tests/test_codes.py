"""Unit tests for code construction, probe states, and presets."""

import numpy as np
import pytest
from conftest import HADAMARD, hadamard_all

from aqec import (
    Code,
    DimSplit,
    anti_aligned_code4,
    code_from_preset,
    haar_unitary,
    partial_trace,
    probe_state,
    repetition_code,
    rotated_code,
    transform_code,
)
from aqec.codes import KET_0, KET_1, KET_MINUS, KET_PLUS, _product_state


class TestCode:
    def test_projector_rank_two(self):
        p = repetition_code(3).projector
        assert np.isclose(np.trace(p).real, 2.0, atol=1e-12)
        assert np.allclose(p @ p, p, atol=1e-12)

    def test_reduced_state_is_half_projector(self):
        code = rotated_code(3)
        assert np.allclose(code.reduced_state(), code.projector / 2.0)

    def test_rejects_non_orthonormal_words(self):
        words = np.stack([np.ones(8) / np.sqrt(8.0), np.ones(8) / np.sqrt(8.0)])
        with pytest.raises(ValueError, match="orthonormal"):
            Code(n=3, words=words)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="shape"):
            Code(n=3, words=np.eye(4)[:2])


class TestPresetCodes:
    def test_repetition_words(self):
        code = repetition_code(3)
        assert np.allclose(
            code.words[0], _product_state([KET_PLUS] * 3), atol=1e-14
        )
        assert np.allclose(
            code.words[1], _product_state([KET_MINUS] * 3), atol=1e-14
        )
        assert code.label == "repetition"

    def test_rotated_words(self):
        code = rotated_code(3)
        assert np.allclose(
            code.words[0], _product_state([KET_0, KET_PLUS, KET_PLUS]), atol=1e-14
        )
        assert np.allclose(
            code.words[1], _product_state([KET_1, KET_MINUS, KET_MINUS]), atol=1e-14
        )

    def test_rotated_position(self):
        code = rotated_code(3, position=2)
        assert np.allclose(
            code.words[0], _product_state([KET_PLUS, KET_PLUS, KET_0]), atol=1e-14
        )
        assert code.label == "rotated[2]"

    def test_rotated_rejects_bad_position(self):
        with pytest.raises(ValueError, match="position"):
            rotated_code(3, position=3)

    def test_anti_aligned_words(self):
        code = anti_aligned_code4()
        assert code.n == 4
        assert np.allclose(
            code.words[0],
            _product_state([KET_PLUS, KET_MINUS, KET_MINUS, KET_MINUS]),
            atol=1e-14,
        )

    def test_rotated_is_hadamard_transformed_repetition(self):
        # Hadamard on qubit 0 maps |+>/|-> to |0>/|1> there
        u = np.kron(HADAMARD, np.eye(4))
        moved = transform_code(repetition_code(3), u)
        assert np.allclose(
            np.abs(moved.words @ rotated_code(3).words.conj().T),
            np.eye(2),
            atol=1e-12,
        )


class TestTransformCode:
    def test_projector_conjugation(self, rng):
        code = repetition_code(3)
        u = haar_unitary(8, rng)
        moved = transform_code(code, u, label="moved")
        assert np.allclose(moved.projector, u @ code.projector @ u.conj().T, atol=1e-12)
        assert moved.label == "moved"

    def test_default_label(self):
        moved = transform_code(repetition_code(3), np.eye(8))
        assert moved.label == "repetition*u"

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            transform_code(repetition_code(3), np.ones((8, 8)))

    def test_rejects_wrong_dimension(self):
        with pytest.raises(ValueError, match="shape"):
            transform_code(repetition_code(3), np.eye(4))


class TestProbeState:
    def test_pure_unit_trace(self):
        probe = probe_state(repetition_code(3))
        rho = probe.rho
        assert probe.split == DimSplit(2, 8)
        assert np.isclose(np.trace(rho).real, 1.0, atol=1e-12)
        assert np.allclose(rho @ rho, rho, atol=1e-12)

    def test_system_marginal_is_reduced_state(self):
        code = rotated_code(3)
        probe = probe_state(code)
        marginal = partial_trace(probe.rho, probe.split, traced="a")
        assert np.allclose(marginal, code.reduced_state(), atol=1e-12)

    def test_ancilla_marginal_is_maximally_mixed(self):
        probe = probe_state(anti_aligned_code4())
        marginal = partial_trace(probe.rho, probe.split, traced="b")
        assert np.allclose(marginal, np.eye(2) / 2.0, atol=1e-12)


class TestCodeFromPreset:
    @pytest.mark.parametrize(
        "preset,label",
        [
            ("repetition", "repetition"),
            ("rotated", "rotated[0]"),
            ("rotated[1]", "rotated[1]"),
            ("random(3)", "random(3)"),
        ],
    )
    def test_parses(self, preset, label):
        assert code_from_preset(preset, 3).label == label

    def test_anti4_requires_four_qubits(self):
        assert code_from_preset("anti4", 4).label == "anti4"
        with pytest.raises(ValueError, match="n = 4"):
            code_from_preset("anti4", 3)

    def test_random_is_seed_deterministic(self):
        a = code_from_preset("random(17)", 3)
        b = code_from_preset("random(17)", 3)
        c = code_from_preset("random(18)", 3)
        assert np.array_equal(a.words, b.words)
        assert not np.allclose(a.words, c.words)

    def test_random_matches_haar_transform(self):
        code = code_from_preset("random(5)", 3)
        u = haar_unitary(8, 5)
        expected = transform_code(repetition_code(3), u)
        assert np.allclose(code.words, expected.words, atol=1e-14)

    @pytest.mark.parametrize(
        "preset",
        ["bogus", "repetition[1]", "repetition(2)", "rotated(3)", "random[4]", ""],
    )
    def test_rejects_malformed(self, preset):
        with pytest.raises(ValueError):
            code_from_preset(preset, 3)


def test_hadamard_conjugated_codes_are_x_basis_twins():
    # used throughout the bitflip checks: W |+->^n words are |01>^n words
    w = hadamard_all(3)
    rep = repetition_code(3)
    twin = transform_code(rep, w, label="repetition-x")
    zero = _product_state([KET_0] * 3)
    one = _product_state([KET_1] * 3)
    assert np.allclose(twin.words[0], zero, atol=1e-12)
    assert np.allclose(twin.words[1], one, atol=1e-12)

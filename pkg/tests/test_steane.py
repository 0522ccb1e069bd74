"""Encoded-gate protocols: transversal gates, the two-block T, error correction."""

import numpy as np
import pytest

from ftwalk.errors import ValidationError
from ftwalk.steane import (
    CODEWORDS_ZERO,
    PHYS_GATES,
    decode,
    encode,
    encode_superposition,
    fidelity,
    ft_t_gate,
    inject_and_correct,
    measure_logical_z,
    prepare_magic_ancilla,
    stabilizer_expectations,
    transversal,
    transversal_cnot,
)

OMEGA = np.exp(1j * np.pi / 4)


def logical(alpha, beta):
    vec = np.array([alpha, beta], dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return encode_superposition(vec[0], vec[1])


def random_qubit(rng):
    vec = rng.normal(size=2) + 1j * rng.normal(size=2)
    return vec / np.linalg.norm(vec)


class TestEncode:
    def test_zero_structure(self):
        psi = encode(0)
        nonzero = np.flatnonzero(psi)
        assert len(nonzero) == 8
        assert set(nonzero) == {int(w, 2) for w in CODEWORDS_ZERO}
        np.testing.assert_allclose(psi[nonzero], np.full(8, 1 / np.sqrt(8)))

    def test_one_is_complement(self):
        psi = encode(1)
        nonzero = np.flatnonzero(psi)
        assert set(nonzero) == {int(w, 2) ^ 0b1111111 for w in CODEWORDS_ZERO}

    def test_codewords_orthonormal(self):
        assert abs(np.vdot(encode(0), encode(1))) < 1e-14
        assert abs(np.linalg.norm(encode(0)) - 1) < 1e-14

    def test_superposition(self):
        psi = encode_superposition(1 / np.sqrt(2), OMEGA / np.sqrt(2))
        a, b = decode(psi)
        assert a == pytest.approx(1 / np.sqrt(2))
        assert b == pytest.approx(OMEGA / np.sqrt(2))

    def test_superposition_norm_checked(self):
        with pytest.raises(ValidationError):
            encode_superposition(1.0, 1.0)

    def test_codewords_are_stabilizer_fixed(self):
        for bit in (0, 1):
            expect = stabilizer_expectations(encode(bit))
            assert all(v == pytest.approx(1.0) for v in expect.values())


class TestTransversal:
    def test_x_swaps_logicals(self):
        assert fidelity(transversal("X", encode(0)), encode(1)) > 1 - 1e-10
        assert fidelity(transversal("X", encode(1)), encode(0)) > 1 - 1e-10

    def test_z_phases_logical_one(self):
        np.testing.assert_allclose(transversal("Z", encode(0)), encode(0), atol=1e-12)
        np.testing.assert_allclose(transversal("Z", encode(1)), -encode(1), atol=1e-12)

    def test_h_makes_plus(self):
        plus = logical(1, 1)
        assert fidelity(transversal("H", encode(0)), plus) > 1 - 1e-10

    def test_s_on_plus(self):
        got = transversal("S", logical(1, 1))
        assert fidelity(got, logical(1, 1j)) > 1 - 1e-10

    @pytest.mark.parametrize("gate", ["H", "X", "Z", "S", "s"])
    def test_logical_action_matches_unencoded(self, gate):
        rng = np.random.default_rng(hash(gate) % 2**32)
        for _ in range(10):
            alpha, beta = random_qubit(rng)
            out = transversal(gate, encode_superposition(alpha, beta))
            target = PHYS_GATES[gate] @ np.array([alpha, beta])
            expected = encode_superposition(*(target / np.linalg.norm(target)))
            assert fidelity(out, expected) > 1 - 1e-10

    def test_s_and_s_dagger_invert(self):
        psi = logical(0.6, 0.8j)
        np.testing.assert_allclose(transversal("s", transversal("S", psi)), psi, atol=1e-12)

    def test_norm_preserved(self):
        psi = logical(0.3, np.sqrt(1 - 0.09) * 1j)
        for gate in ("H", "X", "Z", "S", "s"):
            assert abs(np.linalg.norm(transversal(gate, psi)) - 1) < 1e-10

    def test_bad_block_rejected(self):
        with pytest.raises(ValidationError):
            transversal("X", encode(0), block=range(6))
        with pytest.raises(ValidationError):
            transversal("T", encode(0))


class TestTransversalCnot:
    @staticmethod
    def two_blocks(a, b):
        return np.kron(a, b)

    def test_logical_truth_table(self):
        for c, t, expect_t in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]:
            got = transversal_cnot(
                self.two_blocks(encode(c), encode(t)), range(7), range(7, 14)
            )
            want = self.two_blocks(encode(c), encode(expect_t))
            assert fidelity(got, want) > 1 - 1e-10

    def test_bell_state(self):
        got = transversal_cnot(self.two_blocks(logical(1, 1), encode(0)), range(7), range(7, 14))
        want = (self.two_blocks(encode(0), encode(0)) + self.two_blocks(encode(1), encode(1))) / np.sqrt(2)
        assert fidelity(got, want) > 1 - 1e-10

    def test_overlapping_blocks_rejected(self):
        state = self.two_blocks(encode(0), encode(0))
        with pytest.raises(ValidationError):
            transversal_cnot(state, range(7), range(6, 13))


class TestMeasurement:
    def test_logical_zero_measures_zero(self):
        outcome, post = measure_logical_z(encode(0))
        assert outcome == 0
        assert fidelity(post, encode(0)) > 1 - 1e-12

    def test_forced_branches_on_plus(self):
        plus = logical(1, 1)
        for branch in (0, 1):
            outcome, post = measure_logical_z(plus, branch=branch)
            assert outcome == branch
            assert fidelity(post, encode(branch)) > 1 - 1e-12

    def test_impossible_branch_fails(self):
        from ftwalk.errors import InternalError

        with pytest.raises(InternalError):
            measure_logical_z(encode(0), branch=1)


class TestMagicAncilla:
    def test_both_branches_give_theta(self):
        theta = encode_superposition(1 / np.sqrt(2), OMEGA / np.sqrt(2))
        for branch in (0, 1):
            got = prepare_magic_ancilla(branch=branch)
            assert fidelity(got, theta) > 1 - 1e-10

    def test_branches_equally_likely(self):
        log = []
        prepare_magic_ancilla(branch=1, log=log)
        assert log[0]["probability"] == pytest.approx(0.5)
        assert log[0]["gates"] == ["Z"]


class TestFtTGate:
    def test_t_on_zero_is_zero(self):
        for prep in (0, 1):
            for meas in (0, 1):
                out = ft_t_gate(encode(0), prep_branch=prep, meas_branch=meas)
                assert fidelity(out, encode(0)) > 1 - 1e-9

    def test_t_on_plus(self):
        want = encode_superposition(1 / np.sqrt(2), OMEGA / np.sqrt(2))
        for prep in (0, 1):
            for meas in (0, 1):
                out = ft_t_gate(logical(1, 1), prep_branch=prep, meas_branch=meas)
                assert fidelity(out, want) > 1 - 1e-9

    def test_random_inputs_both_branches(self):
        rng = np.random.default_rng(2024)
        t = PHYS_GATES["T"]
        for trial in range(50):
            alpha, beta = random_qubit(rng)
            target = t @ np.array([alpha, beta])
            want = encode_superposition(*target)
            out = ft_t_gate(
                encode_superposition(alpha, beta),
                prep_branch=trial % 2,
                meas_branch=(trial // 2) % 2,
            )
            assert fidelity(out, want) >= 1 - 1e-9
            assert abs(np.linalg.norm(out) - 1) < 1e-10

    def test_random_branches_via_rng(self):
        rng = np.random.default_rng(7)
        out = ft_t_gate(logical(1, 1), rng=rng)
        want = encode_superposition(1 / np.sqrt(2), OMEGA / np.sqrt(2))
        assert fidelity(out, want) > 1 - 1e-9

    def test_transcript(self):
        log = []
        ft_t_gate(encode(0), prep_branch=1, meas_branch=1, log=log)
        steps = [entry["step"] for entry in log]
        assert steps == ["prepare-ancilla", "transversal-cnot", "measure-data"]
        assert log[2]["gates"] == ["X", "S"]


class TestErrorCorrection:
    @pytest.mark.parametrize("pauli", ["X", "Y", "Z"])
    @pytest.mark.parametrize("position", list(range(1, 8)))
    def test_all_21_single_errors(self, pauli, position):
        for bit in (0, 1):
            psi = encode(bit)
            out = inject_and_correct(psi, pauli, position)
            assert fidelity(out, psi) > 1 - 1e-10

    def test_superposition_recovery(self):
        psi = logical(0.6, 0.8)
        out = inject_and_correct(psi, "Z", 7)
        assert fidelity(out, psi) > 1 - 1e-10

    def test_syndrome_spells_position(self):
        log = []
        inject_and_correct(encode(0), "X", 5, log=log)
        assert log[0]["syndrome"] == {"x_component": 5, "z_component": 0}
        log = []
        inject_and_correct(encode(1), "Y", 3, log=log)
        assert log[0]["syndrome"] == {"x_component": 3, "z_component": 3}

    def test_noncodeword_rejected(self):
        bad = np.zeros(128, dtype=complex)
        bad[0] = 1.0
        with pytest.raises(ValidationError):
            inject_and_correct(bad, "X", 1)

    def test_bad_arguments(self):
        with pytest.raises(ValidationError):
            inject_and_correct(encode(0), "Q", 1)
        with pytest.raises(ValidationError):
            inject_and_correct(encode(0), "X", 0)

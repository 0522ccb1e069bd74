"""Cosine-sine decomposition: padding, recursion, reconstruction, file format."""

import numpy as np
import pytest

from ftwalk.csd import (
    Decomposition,
    TwoLevelOp,
    cs_decompose,
    pad_to_power_of_two,
    read_decomposition,
    reconstruct,
    write_decomposition,
)
from ftwalk.errors import ValidationError
from ftwalk.matcore import distance
from ftwalk.walkgen import Graph, build_walk_operator

from test_matcore import random_unitary


def ry(deg):
    t = np.radians(deg)
    return np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]])


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


class TestTwoLevelOp:
    def test_matrices(self):
        np.testing.assert_allclose(TwoLevelOp("Ry", 90.0, 1, 2).matrix2(), [[0, 1], [-1, 0]], atol=1e-15)
        np.testing.assert_allclose(TwoLevelOp("ZGate", None, 1, 2).matrix2(), [[1, 0], [0, -1]])
        np.testing.assert_allclose(
            TwoLevelOp("Rz", 90.0, 1, 2).matrix2(), [[1j, 0], [0, -1j]], atol=1e-15
        )
        np.testing.assert_allclose(
            TwoLevelOp("Phase", 180.0, 1, 2).matrix2(), [[1, 0], [0, -1]], atol=1e-15
        )

    def test_validation(self):
        with pytest.raises(ValidationError):
            TwoLevelOp("Rx", 10.0, 1, 2)
        with pytest.raises(ValidationError):
            TwoLevelOp("Ry", None, 1, 2)
        with pytest.raises(ValidationError):
            TwoLevelOp("ZGate", 180.0, 1, 2)
        with pytest.raises(ValidationError):
            TwoLevelOp("Ry", 10.0, 3, 2)

    def test_ops_must_fit_dimension(self):
        with pytest.raises(ValidationError):
            Decomposition(padded_dim=4, ops=(TwoLevelOp("Ry", 10.0, 1, 5),))


class TestPad:
    def test_power_of_two_untouched(self):
        u = np.eye(16)
        assert pad_to_power_of_two(u).shape == (16, 16)

    @pytest.mark.parametrize("n,full", [(3, 4), (9, 16), (17, 32), (1, 1), (5, 8)])
    def test_pad_sizes(self, n, full):
        u = np.eye(n)
        u = random_unitary(np.random.default_rng(n), n)
        padded = pad_to_power_of_two(u)
        assert padded.shape == (full, full)
        np.testing.assert_array_equal(padded[:n, :n], u)
        if full > n:
            np.testing.assert_array_equal(padded[n:, n:], np.eye(full - n))
            assert np.max(np.abs(padded[:n, n:])) == 0.0

    def test_rejects_nonunitary(self):
        with pytest.raises(ValidationError):
            pad_to_power_of_two(np.ones((3, 3)))


class TestDecompose:
    def test_base_case_rotation(self):
        dec = cs_decompose(ry(30))
        assert len(dec.ops) == 1
        op = dec.ops[0]
        assert (op.kind, op.p, op.q) == ("Ry", 1, 2)
        assert op.angle_deg == pytest.approx(30.0)

    def test_identity_is_empty(self):
        for n in (2, 4, 16):
            dec = cs_decompose(np.eye(n))
            assert dec.ops == ()
            assert dec.residue == 0.0

    def test_z_is_single_zgate(self):
        dec = cs_decompose(np.diag([1.0, -1.0]))
        assert [op.kind for op in dec.ops] == ["ZGate"]

    def test_reflection_splits_into_rotation_and_z(self):
        dec = cs_decompose(np.array([[0.0, 1.0], [1.0, 0.0]]))
        kinds = [op.kind for op in dec.ops]
        assert kinds == ["Ry", "ZGate"]
        # Ry(−90)·Z = [[0,1],[1,0]]
        assert dec.ops[0].angle_deg == pytest.approx(-90.0)

    def test_roundtrip_random_unitaries(self):
        rng = np.random.default_rng(42)
        dims = [2, 4, 8, 16, 32]
        for trial in range(200):
            n = dims[trial % len(dims)]
            u = random_unitary(rng, n)
            dec = cs_decompose(u)
            assert distance(reconstruct(dec), u) < 1e-9

    def test_real_inputs_stay_real(self):
        rng = np.random.default_rng(9)
        for n in (2, 4, 8, 16, 32):
            for _ in range(8):
                dec = cs_decompose(random_orthogonal(rng, n))
                assert all(op.kind in ("Ry", "ZGate") for op in dec.ops)

    def test_pair_targets_follow_block_structure(self):
        # Within a block of size d starting at offset, the middle factor may
        # only pair p with q = p + d/2; left/right factors recurse into
        # halves.  Checked by simulating the allowed pair set.
        def allowed(offset, d, acc):
            if d < 2:
                return
            half = d // 2
            for r in range(half):
                acc.add((offset + r + 1, offset + r + 1 + half))
            if d == 2:
                return
            allowed(offset, half, acc)
            allowed(offset + half, half, acc)

        acc = set()
        allowed(0, 16, acc)
        rng = np.random.default_rng(21)
        dec = cs_decompose(random_unitary(rng, 16))
        assert {(op.p, op.q) for op in dec.ops} <= acc

    def test_walk_operator_decomposes_real(self):
        op = build_walk_operator(Graph.star(8))
        dec = cs_decompose(pad_to_power_of_two(op.matrix))
        assert dec.residue < 1e-10
        assert all(o.kind in ("Ry", "ZGate") for o in dec.ops)
        assert distance(reconstruct(dec), op.matrix) < 1e-10

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValidationError):
            cs_decompose(np.eye(6))

    def test_angles_normalized(self):
        rng = np.random.default_rng(5)
        dec = cs_decompose(random_unitary(rng, 8))
        for op in dec.ops:
            if op.angle_deg is not None:
                assert -180.0 < op.angle_deg <= 180.0
                assert abs(op.angle_deg) > 1e-9


class TestReconstruct:
    def test_single_minus_90_on_1_9(self):
        dec = Decomposition(padded_dim=16, ops=(TwoLevelOp("Ry", -90.0, 1, 9),))
        m = reconstruct(dec)
        expected = np.eye(16, dtype=complex)
        expected[0, 0] = expected[8, 8] = 0.0
        expected[0, 8] = -1.0
        expected[8, 0] = 1.0
        np.testing.assert_allclose(m, expected, atol=1e-15)

    def test_empty_is_identity(self):
        np.testing.assert_array_equal(reconstruct(Decomposition(4, ())), np.eye(4))

    def test_order_is_left_to_right_product(self):
        a = TwoLevelOp("Ry", 90.0, 1, 2)
        b = TwoLevelOp("Phase", 90.0, 1, 2)
        dec = Decomposition(2, (a, b))
        np.testing.assert_allclose(
            reconstruct(dec), a.matrix2() @ b.matrix2(), atol=1e-15
        )


class TestFiles:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(1)
        dec = cs_decompose(random_unitary(rng, 8))
        path = tmp_path / "dec.csv"
        write_decomposition(path, dec)
        loaded = read_decomposition(path)
        assert loaded.padded_dim == 8
        assert loaded.ops == dec.ops
        assert distance(reconstruct(loaded), reconstruct(dec)) < 1e-12

    def test_zgate_row_has_empty_angle(self, tmp_path):
        dec = cs_decompose(np.diag([1.0, -1.0]))
        path = tmp_path / "dec.csv"
        write_decomposition(path, dec)
        assert "ZGate,,1,2" in path.read_text()

    def test_read_rejects_bad_rows(self, tmp_path):
        path = tmp_path / "dec.csv"
        path.write_text("kind,angle_deg,p,q\nRy,ten,1,2\n")
        with pytest.raises(ValidationError, match=":2"):
            read_decomposition(path)
        path.write_text("angle,p,q\n")
        with pytest.raises(ValidationError):
            read_decomposition(path)

    def test_dim_defaults_to_covering_power_of_two(self, tmp_path):
        path = tmp_path / "dec.csv"
        path.write_text("kind,angle_deg,p,q\nRy,45.0,1,9\n")
        assert read_decomposition(path).padded_dim == 16

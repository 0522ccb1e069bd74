"""Graph parsing, state ordering, and walk-operator assembly."""

import json

import numpy as np
import pytest

from ftwalk.errors import ValidationError
from ftwalk.walkgen import (
    EdgeStateIndex,
    Graph,
    build_state_index,
    build_walk_operator,
    grover_coin,
    load_coin_file,
    parse_graph_file,
    parse_order_file,
    state_probabilities,
    walk_step,
)

from test_matcore import random_unitary


def star8_operator():
    """8-star with the hub labelled 9 so the default order is leaf-to-hub first."""
    return build_walk_operator(Graph.star(8))


def expected_star8():
    m = np.zeros((16, 16))
    m[0:8, 8:16] = 0.25
    m[np.arange(8), np.arange(8, 16)] = -0.75
    m[8:16, 0:8] = np.eye(8)
    return m


class TestGraph:
    def test_rejects_duplicate_edges(self):
        with pytest.raises(ValidationError):
            Graph(3, ((1, 2), (2, 1)))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            Graph(2, ((1, 3),))

    def test_star_helper(self):
        g = Graph.star(8)
        assert g.vertex_count == 9
        assert g.edges == tuple((v, 9) for v in range(1, 9))

    def test_self_loop_allowed(self):
        g = Graph(1, ((1, 1),))
        assert build_state_index(g).count == 1


class TestStateIndex:
    def test_default_order_sorts_pairs(self):
        g = Graph(3, ((1, 2), (2, 3), (1, 3)))
        idx = build_state_index(g)
        assert idx.count == 6
        assert idx.states == ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))

    def test_single_edge(self):
        idx = build_state_index(Graph(2, ((1, 2),)))
        assert idx.states == ((1, 2), (2, 1))

    def test_override_permutation(self):
        g = Graph(2, ((1, 2),))
        idx = build_state_index(g, order=[(2, 1), (1, 2)])
        assert idx.states == ((2, 1), (1, 2))
        assert idx.position[(2, 1)] == 0

    def test_override_must_cover_all_states(self):
        g = Graph(2, ((1, 2),))
        with pytest.raises(ValidationError):
            build_state_index(g, order=[(1, 2)])
        with pytest.raises(ValidationError):
            build_state_index(g, order=[(1, 2), (1, 2)])

    def test_duplicate_state_rejected(self):
        with pytest.raises(ValidationError):
            EdgeStateIndex(((1, 2), (1, 2)))


class TestGroverCoin:
    def test_d8_entries(self):
        c = grover_coin(8)
        assert c[0, 0] == -0.75
        assert c[0, 1] == 0.25
        np.testing.assert_array_equal(np.diag(c), np.full(8, -0.75))

    def test_d1_and_d2(self):
        np.testing.assert_array_equal(grover_coin(1), [[1.0]])
        np.testing.assert_array_equal(grover_coin(2), [[0.0, 1.0], [1.0, 0.0]])

    @pytest.mark.parametrize("d", [1, 2, 3, 5, 8, 13])
    def test_self_inverse(self, d):
        c = grover_coin(d)
        np.testing.assert_allclose(c @ c, np.eye(d), atol=1e-12)
        np.testing.assert_array_equal(c, c.T)

    def test_rejects_zero(self):
        with pytest.raises(ValidationError):
            grover_coin(0)


class TestWalkOperator:
    def test_star8_matches_expected_exactly(self):
        op = star8_operator()
        assert np.max(np.abs(op.matrix - expected_star8())) < 1e-12
        assert np.max(np.abs(op.matrix.imag)) == 0.0

    def test_star8_with_low_hub_label_needs_override(self):
        # Hub labelled 1: the default (j, k)-sorted order puts hub-to-leaf
        # states first, so the blocks land elsewhere; the override restores
        # the leaf-to-hub-first numbering.
        g = Graph.star(8, center=1)
        default = build_walk_operator(g)
        assert np.max(np.abs(default.matrix - expected_star8())) > 0.1
        order = [(v, 1) for v in range(2, 10)] + [(1, v) for v in range(2, 10)]
        op = build_walk_operator(g, idx=build_state_index(g, order=order))
        assert np.max(np.abs(op.matrix - expected_star8())) < 1e-12

    def test_single_edge_is_swap(self):
        op = build_walk_operator(Graph(2, ((1, 2),)))
        np.testing.assert_array_equal(op.matrix.real, [[0, 1], [1, 0]])

    def test_identity_coin_gives_pure_shift(self):
        g = Graph(4, ((1, 2), (2, 3), (3, 4), (4, 1)))
        op = build_walk_operator(g, coin_family="identity")
        np.testing.assert_array_equal(op.matrix, op.shift)
        # a permutation matrix: single 1 per row/column
        np.testing.assert_array_equal(op.matrix.real.sum(axis=0), np.ones(8))
        np.testing.assert_array_equal(np.sort(op.matrix.real, axis=0)[-1], np.ones(8))

    def test_shift_is_involution(self):
        g = Graph(5, ((1, 2), (1, 3), (2, 4), (3, 5), (4, 5), (2, 5)))
        op = build_walk_operator(g)
        np.testing.assert_array_equal(op.shift @ op.shift, np.eye(op.dim))

    def test_factorization_is_exact(self):
        g = Graph(4, ((1, 2), (1, 3), (1, 4), (3, 4)))
        op = build_walk_operator(g)
        np.testing.assert_array_equal(op.matrix, op.shift @ op.coin)

    def test_random_coins_keep_unitarity(self):
        rng = np.random.default_rng(11)
        g = Graph(5, ((1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (2, 5), (1, 5)))
        idx = build_state_index(g)
        degree = {}
        for j, _ in idx.states:
            degree[j] = degree.get(j, 0) + 1
        coins = {v: random_unitary(rng, d) for v, d in degree.items()}
        op = build_walk_operator(g, coin_family=coins, idx=idx)
        np.testing.assert_allclose(
            op.matrix.conj().T @ op.matrix, np.eye(op.dim), atol=1e-10
        )

    def test_coin_dimension_mismatch(self):
        g = Graph(2, ((1, 2),))
        with pytest.raises(ValidationError):
            build_walk_operator(g, coin_family={1: np.eye(2), 2: np.eye(1)})

    def test_nonunitary_coin_rejected(self):
        g = Graph(2, ((1, 2),))
        bad = {1: np.array([[2.0]]), 2: np.array([[1.0]])}
        with pytest.raises(ValidationError):
            build_walk_operator(g, coin_family=bad)

    def test_missing_coin_rejected(self):
        g = Graph(2, ((1, 2),))
        with pytest.raises(ValidationError):
            build_walk_operator(g, coin_family={1: np.eye(1)})


class TestWalkStep:
    def test_e1_maps_to_e9(self):
        op = star8_operator()
        psi = np.zeros(16)
        psi[0] = 1.0
        out = walk_step(op, psi)
        expect = np.zeros(16)
        expect[8] = 1.0
        np.testing.assert_allclose(out, expect, atol=1e-12)

    def test_e9_spreads_over_leaves(self):
        op = star8_operator()
        psi = np.zeros(16)
        psi[8] = 1.0
        probs = state_probabilities(walk_step(op, psi))
        np.testing.assert_allclose(probs[0], 0.5625, atol=1e-12)
        np.testing.assert_allclose(probs[1:8], np.full(7, 0.0625), atol=1e-12)
        np.testing.assert_allclose(probs[8:], np.zeros(8), atol=1e-12)

    def test_norm_preserved_over_random_states(self):
        op = star8_operator()
        rng = np.random.default_rng(3)
        for _ in range(100):
            psi = rng.normal(size=16) + 1j * rng.normal(size=16)
            psi /= np.linalg.norm(psi)
            assert abs(np.linalg.norm(walk_step(op, psi)) - 1.0) < 1e-10

    def test_rejects_wrong_shape_and_norm(self):
        op = star8_operator()
        with pytest.raises(ValidationError):
            walk_step(op, np.zeros(4))
        with pytest.raises(ValidationError):
            walk_step(op, np.full(16, 0.5))


class TestFiles:
    def test_parse_graph_file(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# a comment\nvertices 3\n1 2\n2 3\n")
        g = parse_graph_file(p)
        assert g.vertex_count == 3
        assert g.edges == ((1, 2), (2, 3))

    def test_parse_errors_carry_line_numbers(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("vertices 3\n1 2 3\n")
        with pytest.raises(ValidationError, match=r"g\.txt:2"):
            parse_graph_file(p)
        p.write_text("1 2\n")
        with pytest.raises(ValidationError, match="vertices"):
            parse_graph_file(p)
        p.write_text("vertices 2\n")
        with pytest.raises(ValidationError) as err:
            parse_graph_file(tmp_path / "absent.txt")
        assert "absent.txt" in str(err.value)

    def test_parse_order_file(self, tmp_path):
        p = tmp_path / "order.txt"
        p.write_text("2 1\n1 2\n")
        assert parse_order_file(p) == [(2, 1), (1, 2)]
        p.write_text("\n")
        with pytest.raises(ValidationError):
            parse_order_file(p)

    def test_load_coin_file(self, tmp_path):
        p = tmp_path / "coins.json"
        p.write_text(json.dumps({"1": {"re": [[1.0]]}, "2": {"re": [[0.0]], "im": [[1.0]]}}))
        coins = load_coin_file(p)
        assert coins[1] == np.array([[1.0]])
        assert coins[2] == np.array([[1j]])
        p.write_text(json.dumps({"1": {"im": [[1.0]]}}))
        with pytest.raises(ValidationError):
            load_coin_file(p)
        p.write_text("[]")
        with pytest.raises(ValidationError):
            load_coin_file(p)

"""Distance/error metrics and the shared matrix file format."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftwalk.errors import ValidationError
from ftwalk.matcore import (
    distance,
    error_stats,
    is_unitary,
    read_matrix,
    require_unitary,
    write_matrix,
)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r))).conj()


def test_distance_identity_zero():
    assert distance(np.eye(2), np.eye(2)) == 0.0


def test_distance_identity_vs_z():
    z = np.diag([1.0, -1.0])
    assert distance(np.eye(2), z) == pytest.approx(1.0, abs=1e-15)


def test_distance_symmetric_and_phase_invariant():
    rng = np.random.default_rng(7)
    a = random_unitary(rng, 8)
    b = random_unitary(rng, 8)
    d1 = distance(a, b)
    assert d1 == pytest.approx(distance(b, a), abs=1e-12)
    assert distance(a, np.exp(0.37j) * b) == pytest.approx(d1, abs=1e-12)
    assert distance(a, a) < 1e-12


def test_distance_rejects_mismatch_and_nonunitary():
    with pytest.raises(ValidationError):
        distance(np.eye(2), np.eye(4))
    with pytest.raises(ValidationError):
        distance(np.eye(2), np.array([[1, 0], [0, 2.0]]))


def test_error_stats_trivial():
    u = np.diag([1.0, -1.0, 1.0, 1.0])
    stats = error_stats(u, u)
    assert (stats.max_abs_real, stats.max_rel_real, stats.max_imag) == (0.0, 0.0, 0.0)


def test_error_stats_values():
    target = np.array([[1.0, 0.0], [0.5, -1.0]])
    approx = np.array([[1.02, 0.03], [0.47, -1.0 + 0.2j]])
    stats = error_stats(target, approx)
    assert stats.max_abs_real == pytest.approx(0.03)
    assert stats.max_rel_real == pytest.approx(0.03 / 0.5)
    assert stats.max_imag == pytest.approx(0.2)


def test_require_unitary_accepts_rotation():
    theta = 0.3
    m = np.array([[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]])
    require_unitary(m)
    assert is_unitary(m)


def test_matrix_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    m = random_unitary(rng, 5)
    path = tmp_path / "m.json"
    write_matrix(path, m)
    np.testing.assert_array_equal(read_matrix(path), m)
    # Byte-stable: writing the same matrix twice gives identical files.
    path2 = tmp_path / "m2.json"
    write_matrix(path2, m)
    assert path.read_bytes() == path2.read_bytes()


def test_read_matrix_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "re": [[1, 0]], "im": [[0, 0]]}')
    with pytest.raises(ValidationError):
        read_matrix(bad)
    bad.write_text("not json")
    with pytest.raises(ValidationError):
        read_matrix(bad)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 8]))
def test_distance_range_property(seed, n):
    rng = np.random.default_rng(seed)
    a = random_unitary(rng, n)
    b = random_unitary(rng, n)
    d = distance(a, b)
    assert 0.0 <= d <= 1.0

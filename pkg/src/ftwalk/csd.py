"""Recursive cosine-sine decomposition into two-level operations.

A padded 2^M-dimensional unitary is split recursively: each level peels off a
middle factor made of cosine-sine pairs (one plane rotation per pair) and
recurses into the four block-diagonal corner factors, until the blocks are
2×2 and can be emitted directly.  The result is an ordered list of two-level
operations; the first list element is the leftmost matrix factor, i.e. the
operation applied last to a state vector.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import cossin

from .errors import DecompositionError, ValidationError
from .matcore import as_matrix, require_unitary

__all__ = [
    "KINDS",
    "TwoLevelOp",
    "Decomposition",
    "pad_to_power_of_two",
    "cs_decompose",
    "reconstruct",
    "write_decomposition",
    "read_decomposition",
]

KINDS = ("Ry", "Rz", "Phase", "ZGate")

#: treat a block as identity / an angle as zero below these
_IDENTITY_TOL = 1e-13
_ANGLE_DROP_DEG = 1e-9
_RESIDUE_LIMIT = 1e-8


def _norm_deg(angle: float) -> float:
    """Map an angle in degrees to (−180, 180]."""
    n = angle % 360.0
    if n > 180.0:
        n -= 360.0
    return n


@dataclass(frozen=True)
class TwoLevelOp:
    """A 2×2 unitary acting on vector entries p and q (1-based, p < q).

    Kinds: ``Ry`` = [[cos, sin], [−sin, cos]]; ``Rz`` = diag(e^{iφ}, e^{−iφ});
    ``Phase`` = diag(1, e^{iφ}); ``ZGate`` = diag(1, −1) and carries no angle.
    """

    kind: str
    angle_deg: float | None
    p: int
    q: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown two-level kind {self.kind!r}")
        if self.kind == "ZGate":
            if self.angle_deg is not None:
                raise ValidationError("ZGate carries no angle")
        elif self.angle_deg is None:
            raise ValidationError(f"{self.kind} requires an angle")
        if not (1 <= self.p < self.q):
            raise ValidationError(f"need 1 <= p < q, got p={self.p}, q={self.q}")

    def matrix2(self) -> np.ndarray:
        if self.kind == "ZGate":
            return np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
        t = math.radians(self.angle_deg)
        if self.kind == "Ry":
            c, s = math.cos(t), math.sin(t)
            return np.array([[c, s], [-s, c]], dtype=complex)
        if self.kind == "Rz":
            return np.array([[np.exp(1j * t), 0.0], [0.0, np.exp(-1j * t)]])
        return np.array([[1.0, 0.0], [0.0, np.exp(1j * t)]])


@dataclass(frozen=True)
class Decomposition:
    """Ordered two-level factorization of a padded unitary."""

    padded_dim: int
    ops: tuple[TwoLevelOp, ...]
    residue: float | None = None
    source: str | None = None

    def __post_init__(self):
        for op in self.ops:
            if op.q > self.padded_dim:
                raise ValidationError(
                    f"op targets ({op.p},{op.q}) outside dimension {self.padded_dim}"
                )

    def __len__(self) -> int:
        return len(self.ops)


def pad_to_power_of_two(u) -> np.ndarray:
    """Embed U as block-diag(U, I) of the smallest power-of-two dimension."""
    u = as_matrix(u)
    require_unitary(u)
    n = u.shape[0]
    full = 1 << (n - 1).bit_length()
    if full == n:
        return u
    out = np.eye(full, dtype=complex)
    out[:n, :n] = u
    return out


def _emit(kind, angle_deg, p, q, ops):
    if kind != "ZGate":
        angle_deg = _norm_deg(angle_deg)
        if abs(angle_deg) < _ANGLE_DROP_DEG:
            return
    ops.append(TwoLevelOp(kind=kind, angle_deg=angle_deg, p=p, q=q))


def _emit_diag(mu, nu, p, q, ops):
    """diag(e^{iμ}, e^{iν}) as Rz(μ)·Phase(μ+ν), angles in radians."""
    _emit("Rz", math.degrees(mu), p, q, ops)
    _emit("Phase", math.degrees(mu + nu), p, q, ops)


def _emit_terminal(block, p, q, ops):
    """Factor a 2×2 unitary at entries (p, q) into two-level ops."""
    if np.max(np.abs(block.imag)) < _IDENTITY_TOL:
        m = block.real
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det > 0:  # plane rotation
            _emit("Ry", math.degrees(math.atan2(m[0, 1], m[0, 0])), p, q, ops)
        else:  # reflection: Ry(φ)·Z
            _emit("Ry", math.degrees(math.atan2(-m[0, 1], m[0, 0])), p, q, ops)
            _emit("ZGate", None, p, q, ops)
        return

    # Complex block: left-diagonal · Ry · right-diagonal, phases chosen so the
    # right diagonal's first entry is real (one gauge degree of freedom).
    a, b = block[0, 0], block[0, 1]
    c, d = block[1, 0], block[1, 1]
    gamma = math.atan2(abs(b), abs(a))
    cos_g, sin_g = math.cos(gamma), math.sin(gamma)
    if abs(a) > _IDENTITY_TOL:
        mu1 = float(np.angle(a))
        nu2 = float(np.angle(b)) - mu1 if abs(b) > _IDENTITY_TOL else 0.0
    else:
        mu1 = float(np.angle(b))
        nu2 = 0.0
    if abs(c) > _IDENTITY_TOL:
        nu1 = float(np.angle(-c))
    else:
        nu1 = float(np.angle(d)) - nu2
    check = np.array(
        [
            [np.exp(1j * mu1) * cos_g, np.exp(1j * (mu1 + nu2)) * sin_g],
            [-np.exp(1j * nu1) * sin_g, np.exp(1j * (nu1 + nu2)) * cos_g],
        ]
    )
    if np.max(np.abs(check - block)) > 1e-10:
        raise DecompositionError("terminal 2×2 factorization failed to converge")
    _emit_diag(mu1, nu1, p, q, ops)
    _emit("Ry", math.degrees(gamma), p, q, ops)
    _emit_diag(0.0, nu2, p, q, ops)


def _decompose_block(u, offset, ops):
    d = u.shape[0]
    if np.max(np.abs(u - np.eye(d))) < _IDENTITY_TOL:
        return
    if d == 1:
        # a lone global phase has no two-level expression
        raise DecompositionError("cannot express a 1×1 phase as a two-level operation")
    if d == 2:
        _emit_terminal(u, offset + 1, offset + 2, ops)
        return
    half = d // 2
    left, cs, righth = cossin(u, p=half, q=half)
    # cs = [[C, −S], [S, C]] with C = diag(cos θ_r), S = diag(sin θ_r):
    # each pair (r, r+half) is a plane rotation Ry(−θ_r) in this convention.
    _decompose_block(left[:half, :half], offset, ops)
    _decompose_block(left[half:, half:], offset + half, ops)
    for r in range(half):
        theta = math.degrees(math.atan2(cs[half + r, r].real, cs[r, r].real))
        _emit("Ry", -theta, offset + r + 1, offset + r + 1 + half, ops)
    _decompose_block(righth[:half, :half], offset, ops)
    _decompose_block(righth[half:, half:], offset + half, ops)


def cs_decompose(u, source: str | None = None) -> Decomposition:
    """Factor a power-of-two-dimensional unitary into two-level operations.

    The returned op list reconstructs the input within 1e-10 (checked; a
    larger residue raises).  For real orthogonal input every op is a plane
    rotation or a ZGate.
    """
    u = as_matrix(u)
    require_unitary(u)
    n = u.shape[0]
    if n & (n - 1):
        raise ValidationError(f"dimension {n} is not a power of two (pad first)")
    ops: list[TwoLevelOp] = []
    _decompose_block(u, 0, ops)
    dec = Decomposition(padded_dim=n, ops=tuple(ops), source=source)
    residue = float(np.max(np.abs(reconstruct(dec) - u)))
    if residue >= _RESIDUE_LIMIT:
        raise DecompositionError(f"reconstruction residue {residue:.3e} exceeds 1e-8")
    return Decomposition(padded_dim=n, ops=tuple(ops), residue=residue, source=source)


def reconstruct(dec: Decomposition) -> np.ndarray:
    """Multiply the ops back into the full matrix (first op = leftmost factor)."""
    n = dec.padded_dim
    out = np.eye(n, dtype=complex)
    for op in dec.ops:
        g = op.matrix2()
        p, q = op.p - 1, op.q - 1
        cp, cq = out[:, p].copy(), out[:, q].copy()
        out[:, p] = cp * g[0, 0] + cq * g[1, 0]
        out[:, q] = cp * g[0, 1] + cq * g[1, 1]
    return out


def write_decomposition(path, dec: Decomposition) -> None:
    """CSV ``kind,angle_deg,p,q`` in application order, after a # dim comment."""
    buf = io.StringIO()
    buf.write(f"# dim={dec.padded_dim}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "angle_deg", "p", "q"])
    for op in dec.ops:
        angle = "" if op.angle_deg is None else f"{op.angle_deg!r}"
        writer.writerow([op.kind, angle, op.p, op.q])
    Path(path).write_text(buf.getvalue())


def read_decomposition(path) -> Decomposition:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror or exc}") from exc
    dim = None
    rows = []
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            text = line[1:].strip()
            if text.startswith("dim="):
                dim = int(text[4:])
            continue
        if not header_seen:
            if line != "kind,angle_deg,p,q":
                raise ValidationError(f"{path}:{lineno}: bad header {raw!r}")
            header_seen = True
            continue
        parts = next(csv.reader([line]))
        if len(parts) != 4:
            raise ValidationError(f"{path}:{lineno}: expected 4 fields, got {raw!r}")
        kind, angle_text, p_text, q_text = parts
        try:
            angle = None if angle_text == "" else float(angle_text)
            op = TwoLevelOp(kind=kind, angle_deg=angle, p=int(p_text), q=int(q_text))
        except (ValueError, ValidationError) as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        rows.append(op)
    if not header_seen:
        raise ValidationError(f"{path}: missing header kind,angle_deg,p,q")
    if dim is None:
        dim = max((op.q for op in rows), default=1)
        full = 1 << (dim - 1).bit_length()
        dim = full
    try:
        return Decomposition(padded_dim=dim, ops=tuple(rows), source=str(path))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc

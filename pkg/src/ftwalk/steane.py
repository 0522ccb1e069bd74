"""State-vector simulation of the 7-qubit code's fault-tolerant gate set.

States are dense complex vectors over up to 14 qubits; qubit 0 is the most
significant bit of the basis index, so the printed bit string of a basis
state reads left to right as qubits 0..n−1.  Code qubits are numbered 1..7
in error-handling interfaces to match the syndrome arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InternalError, ValidationError

__all__ = [
    "PHYS_GATES",
    "CODEWORDS_ZERO",
    "MAX_QUBITS",
    "qubit_count",
    "fidelity",
    "encode",
    "encode_superposition",
    "decode",
    "apply_single",
    "apply_cnot",
    "transversal",
    "transversal_cnot",
    "measure_logical_z",
    "prepare_magic_ancilla",
    "ft_t_gate",
    "stabilizer_expectations",
    "inject_and_correct",
]

MAX_QUBITS = 14
_NORM_TOL = 1e-10

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
PHYS_GATES = {
    "H": np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    "T": np.array([[1.0, 0.0], [0.0, np.exp(1j * np.pi / 4)]]),
    "S": np.array([[1.0, 0.0], [0.0, 1j]]),
    "s": np.array([[1.0, 0.0], [0.0, -1j]]),
}

#: the per-qubit gate that realizes each logical gate transversally
_TRANSVERSAL_MAP = {"H": "H", "X": "X", "Z": "Z", "S": "s", "s": "S"}

CODEWORDS_ZERO = (
    "0000000",
    "1010101",
    "0110011",
    "1100110",
    "0001111",
    "1011010",
    "0111100",
    "1101001",
)

#: stabilizer supports, 1-based: generator i flips when the error position
#: has bit i of its binary expansion set, so the syndrome spells the position
_STABILIZER_SUPPORTS = ((1, 3, 5, 7), (2, 3, 6, 7), (4, 5, 6, 7))


def qubit_count(psi: np.ndarray) -> int:
    n = int(np.log2(len(psi)))
    if 1 << n != len(psi):
        raise ValidationError(f"state length {len(psi)} is not a power of two")
    if n > MAX_QUBITS:
        raise ValidationError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
    return n


def _require_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    qubit_count(psi)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValidationError(f"state norm {norm!r} is not 1")
    return psi


def _require_block(block, n) -> tuple[int, ...]:
    block = tuple(int(q) for q in block)
    if len(block) != 7 or len(set(block)) != 7:
        raise ValidationError(f"a code block needs 7 distinct qubits, got {block}")
    if any(not 0 <= q < n for q in block):
        raise ValidationError(f"block {block} outside qubit range 0..{n - 1}")
    return block


def fidelity(a, b) -> float:
    """|⟨a|b⟩|² for unit vectors."""
    return float(abs(np.vdot(np.asarray(a), np.asarray(b))) ** 2)


def encode(bit: int) -> np.ndarray:
    """The 7-qubit codeword for |0⟩ or |1⟩."""
    if bit not in (0, 1):
        raise ValidationError(f"bit must be 0 or 1, got {bit!r}")
    psi = np.zeros(128, dtype=complex)
    amp = 1.0 / math.sqrt(8.0)
    for word in CODEWORDS_ZERO:
        index = int(word, 2)
        if bit:
            index ^= 0b1111111  # the |1⟩ words are the bit complements
        psi[index] = amp
    return psi


def encode_superposition(alpha: complex, beta: complex) -> np.ndarray:
    """alpha·|0_L⟩ + beta·|1_L⟩ for |alpha|² + |beta|² = 1."""
    total = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(total - 1.0) > _NORM_TOL:
        raise ValidationError(f"|alpha|^2 + |beta|^2 = {total!r}, expected 1")
    return alpha * encode(0) + beta * encode(1)


def decode(psi) -> tuple[complex, complex]:
    """Logical amplitudes (⟨0_L|ψ⟩, ⟨1_L|ψ⟩) of a 7-qubit codespace state."""
    psi = _require_state(psi)
    if qubit_count(psi) != 7:
        raise ValidationError("decode works on a single 7-qubit block")
    return complex(np.vdot(encode(0), psi)), complex(np.vdot(encode(1), psi))


def apply_single(psi: np.ndarray, qubit: int, gate: np.ndarray) -> np.ndarray:
    """Apply a 2×2 gate to one qubit (0-based, MSB-first convention)."""
    n = qubit_count(psi)
    if not 0 <= qubit < n:
        raise ValidationError(f"qubit {qubit} outside range 0..{n - 1}")
    tensor = psi.reshape([2] * n)
    out = np.tensordot(gate, tensor, axes=([1], [qubit]))
    return np.moveaxis(out, 0, qubit).reshape(-1)


def apply_cnot(psi: np.ndarray, control: int, target: int) -> np.ndarray:
    n = qubit_count(psi)
    if control == target or not (0 <= control < n and 0 <= target < n):
        raise ValidationError(f"bad CNOT pair ({control}, {target}) for {n} qubits")
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    idx = np.arange(len(psi))
    sel = (idx & cbit) != 0
    out = psi.copy()
    out[idx[sel]] = psi[idx[sel] ^ tbit]
    return out


def transversal(gate: str, psi, block=range(7)) -> np.ndarray:
    """A logical 𝒢 gate (other than T) as seven per-qubit physical gates."""
    psi = _require_state(psi)
    block = _require_block(block, qubit_count(psi))
    if gate not in _TRANSVERSAL_MAP:
        raise ValidationError(f"no transversal implementation for {gate!r}")
    phys = PHYS_GATES[_TRANSVERSAL_MAP[gate]]
    for q in block:
        psi = apply_single(psi, q, phys)
    return psi


def transversal_cnot(psi, control_block, target_block) -> np.ndarray:
    """Logical CNOT: physical CNOTs between corresponding block qubits."""
    psi = _require_state(psi)
    n = qubit_count(psi)
    control_block = _require_block(control_block, n)
    target_block = _require_block(target_block, n)
    if set(control_block) & set(target_block):
        raise ValidationError("control and target blocks overlap")
    for c, t in zip(control_block, target_block):
        psi = apply_cnot(psi, c, t)
    return psi


def _block_parity_signs(n: int, block) -> np.ndarray:
    """(−1)^(number of 1 bits within the block) per basis index."""
    idx = np.arange(1 << n)
    mask = 0
    for q in block:
        mask |= 1 << (n - 1 - q)
    ones = np.zeros(len(idx), dtype=np.int64)
    masked = idx & mask
    while np.any(masked):
        ones += masked & 1
        masked >>= 1
    return np.where(ones % 2 == 0, 1.0, -1.0)


def _resolve_branch(p_first, branch, rng, what):
    if branch is None:
        rng = np.random.default_rng() if rng is None else rng
        return 0 if rng.random() < p_first else 1
    branch = int(branch)
    if branch not in (0, 1):
        raise ValidationError(f"{what} branch must be 0 or 1, got {branch!r}")
    return branch


def measure_logical_z(psi, block=range(7), *, branch=None, rng=None):
    """Ideal projective measurement of Z applied to every block qubit.

    Returns (outcome, post_state); ``branch`` forces the outcome (0 ↦ the +1
    eigenspace) and fails if the forced outcome has vanishing probability.
    """
    psi = _require_state(psi)
    n = qubit_count(psi)
    block = _require_block(block, n)
    signs = _block_parity_signs(n, block)
    probs = np.abs(psi) ** 2
    p_plus = float(np.sum(probs[signs > 0]))
    outcome = _resolve_branch(p_plus, branch, rng, "measurement")
    keep = signs > 0 if outcome == 0 else signs < 0
    p = p_plus if outcome == 0 else 1.0 - p_plus
    if p < 1e-12:
        raise InternalError(f"forced measurement outcome {outcome} has probability {p}")
    post = np.where(keep, psi, 0.0) / math.sqrt(p)
    return outcome, post


def prepare_magic_ancilla(*, branch=None, rng=None, log=None) -> np.ndarray:
    """Encoded (|0⟩ + e^{iπ/4}|1⟩)/√2 via a forced ±1 measurement on |0_L⟩.

    The measured operator is e^{−iπ/4}·S_L·X_L, an involution whose +1
    eigenstate is the target; the −1 branch is repaired with a logical Z.
    """
    psi = encode(0)
    reflected = transversal("S", transversal("X", psi)) * np.exp(-1j * np.pi / 4)
    p_plus = float(np.linalg.norm((psi + reflected) / 2) ** 2)
    outcome = _resolve_branch(p_plus, branch, rng, "preparation")
    if outcome == 0:
        post = (psi + reflected) / 2
        p = p_plus
    else:
        post = (psi - reflected) / 2
        p = 1.0 - p_plus
    if p < 1e-12:
        raise InternalError(f"forced preparation outcome {outcome} has probability {p}")
    post = post / math.sqrt(p)
    applied = []
    if outcome == 1:
        post = transversal("Z", post)
        applied.append("Z")
    if log is not None:
        log.append(
            {
                "step": "prepare-ancilla",
                "branch": outcome,
                "gates": applied,
                "probability": round(p, 12),
            }
        )
    return post


def ft_t_gate(psi, *, prep_branch=None, meas_branch=None, rng=None, log=None) -> np.ndarray:
    """The two-block logical T protocol on an encoded 7-qubit state.

    Prepares the magic ancilla, entangles it with the data block through a
    transversal CNOT (ancilla controls), measures the data block's logical Z,
    and repairs the 1 outcome with logical X then S.  The returned block
    equals T|α⟩ encoded, up to global phase.
    """
    psi = _require_state(psi)
    if qubit_count(psi) != 7:
        raise ValidationError("the T protocol takes a single 7-qubit block")
    ancilla = prepare_magic_ancilla(branch=prep_branch, rng=rng, log=log)
    joint = np.kron(ancilla, psi)  # ancilla = qubits 0..6, data = qubits 7..13
    joint = transversal_cnot(joint, range(7), range(7, 14))
    if log is not None:
        log.append({"step": "transversal-cnot", "control": "ancilla", "target": "data"})
    outcome, joint = measure_logical_z(joint, range(7, 14), branch=meas_branch, rng=rng)
    # The post-measurement state is (ancilla block) ⊗ |outcome_L⟩; peel the
    # data block off by contracting against the measured codeword.
    measured = encode(outcome)
    block = joint.reshape(128, 128) @ measured.conj()
    norm = np.linalg.norm(block)
    if abs(norm - 1.0) > 1e-9:
        raise InternalError(f"data block left the codespace (norm {norm!r})")
    block = block / norm
    applied = []
    if outcome == 1:
        block = transversal("S", transversal("X", block))
        applied = ["X", "S"]
    if log is not None:
        log.append({"step": "measure-data", "branch": outcome, "gates": applied})
    return block


def _pauli_signs_and_perm(n, pauli, qubit):
    """Index permutation and per-index phase for a single-qubit Pauli."""
    bit = 1 << (n - 1 - qubit)
    idx = np.arange(1 << n)
    if pauli == "X":
        return idx ^ bit, np.ones(1 << n, dtype=complex)
    if pauli == "Z":
        return idx, np.where(idx & bit, -1.0, 1.0).astype(complex)
    if pauli == "Y":
        # Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩: source amplitude at idx^bit picks up a
        # phase fixed by the destination bit value.
        return idx ^ bit, np.where(idx & bit, 1j, -1j)
    raise ValidationError(f"unknown Pauli {pauli!r}")


def _apply_pauli(psi, pauli, qubit):
    n = qubit_count(psi)
    perm, phase = _pauli_signs_and_perm(n, pauli, qubit)
    return phase * psi[perm]


def stabilizer_expectations(psi) -> dict[str, float]:
    """Expectation of the six stabilizer generators on a 7-qubit state."""
    psi = _require_state(psi)
    if qubit_count(psi) != 7:
        raise ValidationError("stabilizers are defined on a single 7-qubit block")
    out = {}
    for kind in ("X", "Z"):
        for i, support in enumerate(_STABILIZER_SUPPORTS, start=1):
            acted = psi
            for pos in support:
                acted = _apply_pauli(acted, kind, pos - 1)
            out[f"{kind}{i}"] = float(np.vdot(psi, acted).real)
    return out


def inject_and_correct(psi, pauli: str, position: int, *, log=None) -> np.ndarray:
    """Inject one Pauli error (position 1..7), then syndrome-decode and repair.

    The six ideal generator measurements each give ±1 deterministically on a
    corrupted codeword; the two 3-bit syndromes spell out the binary position
    of the Z-type and X-type error components.
    """
    psi = _require_state(psi)
    if qubit_count(psi) != 7:
        raise ValidationError("error correction works on a single 7-qubit block")
    if not 1 <= position <= 7:
        raise ValidationError(f"error position {position} outside 1..7")
    expect = stabilizer_expectations(psi)
    off = {k: v for k, v in expect.items() if abs(v - 1.0) > 1e-9}
    if off:
        raise ValidationError(f"input is not a codeword: stabilizers {sorted(off)} not +1")

    corrupted = _apply_pauli(psi, pauli, position - 1)

    measured = stabilizer_expectations(corrupted)
    x_pos = sum(1 << (i - 1) for i in (1, 2, 3) if measured[f"Z{i}"] < 0)
    z_pos = sum(1 << (i - 1) for i in (1, 2, 3) if measured[f"X{i}"] < 0)
    repaired = corrupted
    applied = []
    if x_pos:
        repaired = _apply_pauli(repaired, "X", x_pos - 1)
        applied.append(("X", x_pos))
    if z_pos:
        repaired = _apply_pauli(repaired, "Z", z_pos - 1)
        applied.append(("Z", z_pos))
    if log is not None:
        log.append(
            {
                "step": "correct",
                "injected": [pauli, position],
                "syndrome": {"x_component": x_pos, "z_component": z_pos},
                "applied": [list(a) for a in applied],
            }
        )
    return repaired

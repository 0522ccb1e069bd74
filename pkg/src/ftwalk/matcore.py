"""Dense complex matrices, exact ring scalars, and approximation metrics.

A "matrix" throughout the package is a square ``numpy`` array of
``complex128``; this module provides the validation helpers, the two error
metrics used to score an approximation against its target, and the JSON file
format shared by every command.  The exact scalar types live in
:mod:`ftwalk.ring` and are re-exported here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .ring import COEFF_LIMIT, GATE_ORDER, GATES, IDENTITY2, Ring2x2, RingScalar, ring_mul

__all__ = [
    "UNITARY_TOL",
    "COEFF_LIMIT",
    "GATES",
    "GATE_ORDER",
    "IDENTITY2",
    "RingScalar",
    "Ring2x2",
    "ring_mul",
    "ErrorStats",
    "as_matrix",
    "require_unitary",
    "is_unitary",
    "distance",
    "error_stats",
    "write_matrix",
    "read_matrix",
]

#: Single knob for every unitarity check in the package.
UNITARY_TOL = 1e-10


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex128 array with finite entries."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def unitarity_defect(m: np.ndarray) -> float:
    d = m.conj().T @ m - np.eye(m.shape[0])
    return float(np.abs(d).max())


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_defect(np.asarray(m, dtype=np.complex128)) < tol


def require_unitary(m, name: str = "matrix", tol: float = UNITARY_TOL) -> np.ndarray:
    arr = as_matrix(m, name)
    defect = unitarity_defect(arr)
    if not defect < tol:
        raise ValidationError(f"{name} is not unitary (defect {defect:.3e}, tolerance {tol:.1e})")
    return arr


def distance(W, Wl) -> float:
    """Phase-insensitive distance sqrt((w - |tr(W†·Wl)|) / w) in [0, 1].

    The square root amplifies roundoff in the radicand (comparing a float
    unitary against itself leaves ~1e-16 of trace fuzz, which would surface
    as ~1e-8), so radicands below 1e-13 are snapped to zero; the metric is
    not meant to resolve distances that small.
    """
    a = require_unitary(W, "W")
    b = require_unitary(Wl, "Wl")
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    w = a.shape[0]
    value = (w - abs(np.trace(a.conj().T @ b))) / w
    if value < 1e-13:
        return 0.0
    return math.sqrt(min(value, 1.0))


@dataclass(frozen=True)
class ErrorStats:
    """Entrywise error summary of an approximation against a real target."""

    max_abs_real: float
    max_rel_real: float
    max_imag: float


def error_stats(W, Wl) -> ErrorStats:
    """Entrywise errors of Wl against the real-valued target W.

    ``max_abs_real`` ignores the imaginary part of Wl (reported separately as
    ``max_imag``); ``max_rel_real`` is taken over entries where W is nonzero
    and is returned as a fraction, not a percentage.
    """
    a = as_matrix(W, "W")
    b = as_matrix(Wl, "Wl")
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    target = a.real
    abs_err = np.abs(b.real - target)
    nonzero = target != 0
    rel = float((abs_err[nonzero] / np.abs(target[nonzero])).max()) if nonzero.any() else 0.0
    return ErrorStats(
        max_abs_real=float(abs_err.max()),
        max_rel_real=rel,
        max_imag=float(np.abs(b.imag).max()),
    )


def _grid(values: np.ndarray) -> list[list[float]]:
    return [[float(f"{v:.17g}") for v in row] for row in values]


def write_matrix(path, m) -> None:
    """Write a matrix as JSON {"dim", "re", "im"} with 17 significant digits."""
    arr = as_matrix(m)
    payload = {"dim": arr.shape[0], "re": _grid(arr.real), "im": _grid(arr.imag)}
    text = json.dumps(payload, separators=(",", ":"))
    Path(path).write_text(text + "\n")


def read_matrix(path) -> np.ndarray:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    try:
        dim = payload["dim"]
        re = np.array(payload["re"], dtype=np.float64)
        im = np.array(payload["im"], dtype=np.float64)
    except (TypeError, KeyError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed matrix object ({exc})") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValidationError(f"{path}: dim field does not match entry grids")
    return as_matrix(re + 1j * im, str(path))

"""Exact arithmetic for products of the six generator gates.

Every matrix entry of a product of gates from ``{H, X, Z, T, S, s}`` lies in
the ring generated by ``w = exp(i*pi/4)`` over denominators ``sqrt(2)**k``.  A
scalar is stored as four integer coefficients ``(a0, a1, a2, a3)`` meaning

    (a0 + a1*w + a2*w**2 + a3*w**3) / sqrt(2)**k

which makes long gate products exactly comparable: two sequences produce the
same operator if and only if their canonical forms are identical.  ``sqrt(2)``
itself is ``w - w**3``, so a common denominator exponent can always be carried
at the matrix level.

Canonical form for a 2x2 matrix uses one shared exponent ``k``: the matrix is
repeatedly divided by ``sqrt(2)`` while every entry remains divisible and
``k > 0``.  An entry ``(c0, c1, c2, c3)`` is divisible by ``sqrt(2)`` exactly
when ``c0 = c2 (mod 2)`` and ``c1 = c3 (mod 2)``.

Coefficients of a product of ``L`` gates are bounded by ``2 * sqrt(2)**L`` in
absolute value, so 64-bit integers are exact far beyond any reachable sequence
length; a guard raises ``OverflowError`` long before the bound could matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT2 = math.sqrt(2.0)

#: Hard bound on coefficient magnitude; products beyond this raise rather
#: than silently wrap.  (A length-120 word stays below 2**62.)
COEFF_LIMIT = 1 << 62


def _reduce_scalar(a0: int, a1: int, a2: int, a3: int, k: int) -> tuple[int, int, int, int, int]:
    """Divide by sqrt(2) while possible and ``k > 0``."""
    while k > 0 and (a0 - a2) % 2 == 0 and (a1 - a3) % 2 == 0:
        a0, a1, a2, a3 = (a1 - a3) // 2, (a0 + a2) // 2, (a1 + a3) // 2, (a2 - a0) // 2
        k -= 1
    return a0, a1, a2, a3, k


@dataclass(frozen=True)
class RingScalar:
    """One exact scalar ``(a0 + a1*w + a2*w^2 + a3*w^3) / sqrt(2)^k``."""

    a0: int
    a1: int
    a2: int
    a3: int
    k: int = 0

    @classmethod
    def from_int(cls, n: int) -> "RingScalar":
        return cls(n, 0, 0, 0, 0)

    @classmethod
    def canonical(cls, a0: int, a1: int, a2: int, a3: int, k: int) -> "RingScalar":
        if k < 0:
            raise ValueError("denominator exponent must be non-negative")
        return cls(*_reduce_scalar(a0, a1, a2, a3, k))

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return (self.a0, self.a1, self.a2, self.a3)

    def is_zero(self) -> bool:
        return self.a0 == 0 and self.a1 == 0 and self.a2 == 0 and self.a3 == 0

    def scale_up(self, steps: int) -> "RingScalar":
        """Multiply numerator and denominator by sqrt(2)**steps."""
        a0, a1, a2, a3, k = self.a0, self.a1, self.a2, self.a3, self.k
        for _ in range(steps):
            a0, a1, a2, a3, k = a1 - a3, a0 + a2, a1 + a3, a2 - a0, k + 1
        return RingScalar(a0, a1, a2, a3, k)

    def __add__(self, other: "RingScalar") -> "RingScalar":
        k = max(self.k, other.k)
        x = self.scale_up(k - self.k)
        y = other.scale_up(k - other.k)
        return RingScalar.canonical(x.a0 + y.a0, x.a1 + y.a1, x.a2 + y.a2, x.a3 + y.a3, k)

    def __neg__(self) -> "RingScalar":
        return RingScalar(-self.a0, -self.a1, -self.a2, -self.a3, self.k)

    def __sub__(self, other: "RingScalar") -> "RingScalar":
        return self + (-other)

    def __mul__(self, other: "RingScalar") -> "RingScalar":
        # Multiply numerators mod w**4 = -1, add denominator exponents.
        b = other
        c0 = self.a0 * b.a0 - self.a1 * b.a3 - self.a2 * b.a2 - self.a3 * b.a1
        c1 = self.a0 * b.a1 + self.a1 * b.a0 - self.a2 * b.a3 - self.a3 * b.a2
        c2 = self.a0 * b.a2 + self.a1 * b.a1 + self.a2 * b.a0 - self.a3 * b.a3
        c3 = self.a0 * b.a3 + self.a1 * b.a2 + self.a2 * b.a1 + self.a3 * b.a0
        if max(abs(c0), abs(c1), abs(c2), abs(c3)) > COEFF_LIMIT:
            raise OverflowError("ring coefficient exceeded the 64-bit safety bound")
        return RingScalar.canonical(c0, c1, c2, c3, self.k + other.k)

    def conjugate(self) -> "RingScalar":
        return RingScalar(self.a0, -self.a3, -self.a2, -self.a1, self.k)

    def to_complex(self) -> complex:
        re = self.a0 + (self.a1 - self.a3) / _SQRT2
        im = self.a2 + (self.a1 + self.a3) / _SQRT2
        return complex(re, im) * (2.0 ** (-0.5 * self.k))


ZERO = RingScalar(0, 0, 0, 0)
ONE = RingScalar(1, 0, 0, 0)
OMEGA = RingScalar(0, 1, 0, 0)


@dataclass(frozen=True)
class Ring2x2:
    """A 2x2 matrix over the ring, canonicalised to one shared exponent.

    Canonical form: every entry carries the same ``k`` and the matrix as a
    whole is not divisible by sqrt(2) (unless ``k == 0``), so equal matrices
    always have identical representations.
    """

    m00: RingScalar
    m01: RingScalar
    m10: RingScalar
    m11: RingScalar

    @classmethod
    def build(cls, m00: RingScalar, m01: RingScalar, m10: RingScalar, m11: RingScalar) -> "Ring2x2":
        """Bring four scalars to a shared exponent and reduce matrix-wide."""
        k = max(m00.k, m01.k, m10.k, m11.k)
        e = [m.scale_up(k - m.k) for m in (m00, m01, m10, m11)]
        c = [list(m.coeffs) for m in e]
        while k > 0 and all((v[0] - v[2]) % 2 == 0 and (v[1] - v[3]) % 2 == 0 for v in c):
            c = [[(v[1] - v[3]) // 2, (v[0] + v[2]) // 2, (v[1] + v[3]) // 2, (v[2] - v[0]) // 2] for v in c]
            k -= 1
        return cls(*(RingScalar(v[0], v[1], v[2], v[3], k) for v in c))

    @property
    def entries(self) -> tuple[RingScalar, RingScalar, RingScalar, RingScalar]:
        return (self.m00, self.m01, self.m10, self.m11)

    @property
    def k(self) -> int:
        return self.m00.k

    def __mul__(self, other: "Ring2x2") -> "Ring2x2":
        a, b = self, other
        return Ring2x2.build(
            a.m00 * b.m00 + a.m01 * b.m10,
            a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10,
            a.m10 * b.m01 + a.m11 * b.m11,
        )

    def to_array(self) -> np.ndarray:
        return np.array(
            [
                [self.m00.to_complex(), self.m01.to_complex()],
                [self.m10.to_complex(), self.m11.to_complex()],
            ],
            dtype=np.complex128,
        )


def _m(rows: list[list[RingScalar]]) -> Ring2x2:
    return Ring2x2.build(rows[0][0], rows[0][1], rows[1][0], rows[1][1])


IDENTITY2 = _m([[ONE, ZERO], [ZERO, ONE]])

_HALF_SQRT = RingScalar(1, 0, 0, 0, 1)  # 1/sqrt(2)

#: The six generators, keyed by their single-letter names.  ``S`` is the
#: adjoint of ``s`` (phases w**2 and -w**2 on |1>).
GATES: dict[str, Ring2x2] = {
    "H": _m([[_HALF_SQRT, _HALF_SQRT], [_HALF_SQRT, -_HALF_SQRT]]),
    "X": _m([[ZERO, ONE], [ONE, ZERO]]),
    "Z": _m([[ONE, ZERO], [ZERO, -ONE]]),
    "T": _m([[ONE, ZERO], [ZERO, OMEGA]]),
    "S": _m([[ONE, ZERO], [ZERO, OMEGA * OMEGA]]),
    "s": _m([[ONE, ZERO], [ZERO, -(OMEGA * OMEGA)]]),
}

#: Fixed generator order used everywhere a sequence position is enumerated.
GATE_ORDER = "HXZTSs"


def ring_mul(a: Ring2x2, b: Ring2x2) -> Ring2x2:
    """Exact product of two ring matrices (alias for ``a * b``)."""
    return a * b

"""Backend selection and shared helpers for the sequence-search kernel.

The breadth-first sequence search keeps each generation of distinct operators
as a sorted array of canonical ring encodings.  One encoding row is 17 little
``int32`` values::

    [k,  m00.a0..a3,  m01.a0..a3,  m10.a0..a3,  m11.a0..a3]

where ``k`` is the shared denominator exponent of the canonical matrix form
(see :mod:`ftwalk.ring`).  Row ordering is lexicographic over the signed
columns; candidate ties are broken by a word key so that results are
reproducible bit-for-bit.

Two interchangeable backends implement the hot loops: a Cython extension
(``ftwalk._seqkernel``) and a pure NumPy fallback (``ftwalk._seqkernel_py``).
The extension is used when importable unless ``FTWALK_PURE=1`` is set.  Both
produce identical arrays.  Frontier expansion is chunked — both to bound
transient memory and to partition work across threads — and chunk results
meet in one deterministic merge rule, so output never depends on the backend,
the chunk size, or the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .ring import Ring2x2, RingScalar

ENC_WIDTH = 17
GATE_COUNT = 6

#: Coefficient magnitude guard for the int32 kernels; far above anything a
#: depth-60 search can produce, far below the int32 wrap point.
COEFF_GUARD = 1 << 28

#: Frontier rows handled per expansion chunk (bounds transient memory).
CHUNK_ROWS = 1 << 18

if os.environ.get("FTWALK_PURE") == "1":
    from . import _seqkernel_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _seqkernel as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _seqkernel_py as _impl

        BACKEND = "pure"


def backend_name() -> str:
    return BACKEND


def identity_rows() -> np.ndarray:
    """The one-row generation holding the identity matrix."""
    row = np.zeros((1, ENC_WIDTH), dtype=np.int32)
    row[0, 1] = 1
    row[0, 13] = 1
    return row


def ring2x2_to_row(m: Ring2x2) -> np.ndarray:
    row = np.empty(ENC_WIDTH, dtype=np.int32)
    row[0] = m.k
    for i, entry in enumerate(m.entries):
        scaled = entry.scale_up(m.k - entry.k)
        row[1 + 4 * i : 5 + 4 * i] = scaled.coeffs
    return row


def row_to_ring2x2(row: np.ndarray) -> Ring2x2:
    k = int(row[0])
    entries = [
        RingScalar(int(row[1 + 4 * i]), int(row[2 + 4 * i]), int(row[3 + 4 * i]), int(row[4 + 4 * i]), k)
        for i in range(4)
    ]
    return Ring2x2(*entries)


def rows_to_complex(enc: np.ndarray) -> np.ndarray:
    """Float view of encoding rows as an (N, 2, 2) complex array."""
    enc = np.atleast_2d(enc)
    k = enc[:, 0].astype(np.float64)
    a = enc[:, 1:].reshape(-1, 2, 2, 4).astype(np.float64)
    inv_sqrt2 = 2.0**-0.5
    re = a[..., 0] + (a[..., 1] - a[..., 3]) * inv_sqrt2
    im = a[..., 2] + (a[..., 1] + a[..., 3]) * inv_sqrt2
    scale = 2.0 ** (-0.5 * k)
    return (re + 1j * im) * scale[:, None, None]


def sort_dedup_candidates(cand, key, parent, gate):
    """Sort candidate rows by encoding and keep the smallest key per row.

    This is the single merge rule used everywhere candidate sets meet (inside
    a backend pass and when combining expansion chunks), which is what makes
    the search output independent of partitioning.
    """
    order = np.lexsort((key,) + tuple(cand[:, c] for c in range(ENC_WIDTH - 1, -1, -1)))
    cand = cand[order]
    key = key[order]
    parent = parent[order]
    gate = gate[order]
    first = np.empty(len(cand), dtype=bool)
    first[0] = True
    np.any(cand[1:] != cand[:-1], axis=1, out=first[1:])
    return (
        np.ascontiguousarray(cand[first]),
        key[first],
        parent[first],
        gate[first],
    )


def member_mask(cand: np.ndarray, generations: list[np.ndarray]) -> np.ndarray:
    """Which candidate rows already appear in any generation array."""
    return _impl.member_mask(cand, generations)


def expand_generation(
    frontier: np.ndarray,
    wordrank: np.ndarray,
    generations: list[np.ndarray],
    workers: int = 1,
):
    """One breadth-first step: all unseen one-gate extensions of a frontier.

    Returns ``(enc, key, parent, gate)`` sorted by encoding, where ``parent``
    holds row indices into ``frontier`` and ``key = wordrank*6 + gate`` is the
    lexicographic rank of the candidate word.  Rows equal to anything in
    ``generations`` are dropped; duplicates within the step keep the smallest
    key.  ``workers`` only sets the thread pool width.
    """
    n = frontier.shape[0]
    chunk_count = max(1, min(n, max(workers, -(-n // CHUNK_ROWS))))
    bounds = np.linspace(0, n, chunk_count + 1).astype(np.int64)

    def run_chunk(lo: int, hi: int):
        enc_c, key_c, parent_c, gate_c = _impl.expand_dedup(
            np.ascontiguousarray(frontier[lo:hi]), np.ascontiguousarray(wordrank[lo:hi])
        )
        fresh = ~member_mask(enc_c, generations)
        return (
            np.ascontiguousarray(enc_c[fresh]),
            key_c[fresh],
            parent_c[fresh] + np.uint32(lo),
            gate_c[fresh],
        )

    spans = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda span: run_chunk(*span), spans))
    else:
        parts = [run_chunk(*span) for span in spans]
    if len(parts) == 1:
        return parts[0]
    cand = np.concatenate([p[0] for p in parts])
    key = np.concatenate([p[1] for p in parts])
    parent = np.concatenate([p[2] for p in parts])
    gate = np.concatenate([p[3] for p in parts])
    return sort_dedup_candidates(cand, key, parent, gate)

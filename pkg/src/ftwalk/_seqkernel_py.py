"""Pure NumPy backend for the sequence-search kernel.

Mirrors the compiled extension exactly: same encoding layout, same candidate
ordering, same merge rule.  Everything is vectorised over generation rows;
only the reduction loop iterates (bounded by the denominator exponent).

Gate multiplication acts on the right of each matrix, so ``X`` swaps the two
columns, ``Z``/``T``/``S``/``s`` rescale the second column by a ring unit, and
``H`` mixes the columns and raises the denominator exponent by one before the
matrix-wide reduction.
"""

from __future__ import annotations

import numpy as np

_ENC_WIDTH = 17
_GUARD = 1 << 28


def _reduce_inplace(k: np.ndarray, a: np.ndarray) -> None:
    """Divide each matrix by sqrt(2) while all 4 entries allow it and k > 0."""
    while True:
        even = (((a[..., 0] - a[..., 2]) & 1) == 0) & (((a[..., 1] - a[..., 3]) & 1) == 0)
        mask = even.all(axis=(1, 2)) & (k > 0)
        if not mask.any():
            return
        sub = a[mask]
        red = np.empty_like(sub)
        red[..., 0] = (sub[..., 1] - sub[..., 3]) // 2
        red[..., 1] = (sub[..., 0] + sub[..., 2]) // 2
        red[..., 2] = (sub[..., 1] + sub[..., 3]) // 2
        red[..., 3] = (sub[..., 2] - sub[..., 0]) // 2
        a[mask] = red
        k[mask] -= 1


def _child(k: np.ndarray, a: np.ndarray, gate: int) -> tuple[np.ndarray, np.ndarray]:
    if gate == 0:  # H
        b = np.empty_like(a)
        b[:, :, 0, :] = a[:, :, 0, :] + a[:, :, 1, :]
        b[:, :, 1, :] = a[:, :, 0, :] - a[:, :, 1, :]
        if np.abs(b).max(initial=0) >= _GUARD:
            raise OverflowError("search coefficients exceeded the int32 safety bound")
        kk = k + 1
        _reduce_inplace(kk, b)
        return kk, b
    kk = k.copy()
    if gate == 1:  # X: swap columns
        return kk, a[:, :, ::-1, :].copy()
    b = a.copy()
    col = b[:, :, 1, :]
    if gate == 2:  # Z: negate second column
        col *= -1
    elif gate == 3:  # T: second column times w
        col[...] = np.stack([-a[:, :, 1, 3], a[:, :, 1, 0], a[:, :, 1, 1], a[:, :, 1, 2]], axis=-1)
    elif gate == 4:  # S: second column times w^2
        col[...] = np.stack([-a[:, :, 1, 2], -a[:, :, 1, 3], a[:, :, 1, 0], a[:, :, 1, 1]], axis=-1)
    elif gate == 5:  # s: second column times -w^2
        col[...] = np.stack([a[:, :, 1, 2], a[:, :, 1, 3], -a[:, :, 1, 0], -a[:, :, 1, 1]], axis=-1)
    else:
        raise ValueError(f"gate index out of range: {gate}")
    return kk, b


def expand_dedup(enc: np.ndarray, wordrank: np.ndarray):
    n = enc.shape[0]
    k = enc[:, 0]
    a = enc[:, 1:].reshape(n, 2, 2, 4)
    blocks = []
    for g in range(6):
        kk, b = _child(k, a, g)
        out = np.empty((n, _ENC_WIDTH), dtype=np.int32)
        out[:, 0] = kk
        out[:, 1:] = b.reshape(n, 16)
        blocks.append(out)
    cand = np.concatenate(blocks)
    parent = np.tile(np.arange(n, dtype=np.uint32), 6)
    gate = np.repeat(np.arange(6, dtype=np.uint8), n)
    key = wordrank.astype(np.uint64)[parent] * 6 + gate
    from .kernel import sort_dedup_candidates

    return sort_dedup_candidates(cand, key, parent, gate)


def member_mask(cand, generations):
    """Which candidate rows appear in any of the sorted generation arrays.

    Both sides of each comparison hold unique rows, so after a stable merge
    sort every run has at most one generation row followed by at most one
    candidate row; a candidate is a member exactly when it closes such a run.
    """
    mask = np.zeros(len(cand), dtype=bool)
    for arr in generations:
        if arr.shape[0] == 0:
            continue
        m = arr.shape[0]
        stacked = np.concatenate([arr, cand])
        order = np.lexsort(tuple(stacked[:, c] for c in range(_ENC_WIDTH - 1, -1, -1)))
        rows = stacked[order]
        eq = np.all(rows[1:] == rows[:-1], axis=1)
        hit = eq & (order[1:] >= m) & (order[:-1] < m)
        mask[order[1:][hit] - m] = True
    return mask

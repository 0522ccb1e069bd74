"""Sequence search and compilation over the gate set {H, X, Z, T, S, s}.

The search enumerates gate words breadth-first by length, keeping one exact
canonical matrix per distinct operator (exact equality, not equality up to
global phase).  Every new operator is tested against the approximate-rotation
form

    [[cos(phi) + i*a,  sin(phi) + i*b],
     [-sin(phi) + i*c, cos(phi) + i*d]]

and accepted when r = max(|a|, |b|, |c|, |d|) stays below the threshold.
Accepted operators populate four angle tables (two policies x two signs)
keyed by the angle rounded to 0.001 degrees.

Determinism: candidate words are ordered by the lexicographic rank of the
word under the alphabet order H<X<Z<T<S<s, the first word reaching a matrix
is kept, and every merge uses one shared ordering rule, so table output is
byte-identical across runs, worker counts, and kernel backends.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernel
from .errors import InternalError, UnsupportedOperationError, ValidationError
from .matcore import require_unitary
from .ring import GATE_ORDER, GATES, IDENTITY2, Ring2x2

POLICIES = ("best_r_first", "shortest_first")
SIGNS = ("positive", "negative")

#: Diagonal real parts must agree this closely to share one cos(phi).
DIAG_TOL = 1e-9
#: Off-diagonal real parts must cancel to within this multiple of accept_r
#: (unitarity already forces near-cancellation whenever the diagonal is
#: appreciable; the explicit bound rejects degenerate cases like X).
SIN_SUM_FACTOR = 2.0

_ANGLE_SCALE = 1000  # table keys are integer millidegrees


def evaluate(seq: str) -> Ring2x2:
    """Exact matrix of a gate word (leftmost symbol = last gate applied)."""
    result = IDENTITY2
    for ch in seq:
        try:
            gate = GATES[ch]
        except KeyError:
            raise ValidationError(f"unknown gate symbol {ch!r}") from None
        result = result * gate
    return result


@dataclass(frozen=True)
class RyMatch:
    angle_deg: float
    r: float
    epsilon_deg: float


def _match_arrays(mats: np.ndarray, accept_r: float):
    """Vectorised form match over an (N, 2, 2) complex array.

    Returns (ok, phi_deg, r, eps_deg); phi/eps are valid only where ok.
    """
    re = mats.real
    im = mats.imag
    r = np.abs(im).reshape(len(mats), 4).max(axis=1)
    ok = (
        (np.abs(re[:, 0, 0] - re[:, 1, 1]) < DIAG_TOL)
        & (np.abs(re[:, 0, 1] + re[:, 1, 0]) < SIN_SUM_FACTOR * accept_r)
        & (r < accept_r)
    )
    c = 0.5 * (re[:, 0, 0] + re[:, 1, 1])
    s = 0.5 * (re[:, 0, 1] - re[:, 1, 0])
    phi = np.degrees(np.arctan2(s, c))
    ref = np.arcsin(np.clip(np.sin(np.radians(phi)), -1.0, 1.0))
    e1 = np.abs(np.arcsin(np.clip(re[:, 0, 1], -1.0, 1.0)) - ref)
    e2 = np.abs(np.arcsin(np.clip(-re[:, 1, 0], -1.0, 1.0)) - ref)
    eps = np.degrees(np.maximum(e1, e2))
    return ok, phi, r, eps


def match_ry_form(mat, accept_r: float = 0.1) -> RyMatch | None:
    """Match one unitary against the approximate-rotation form.

    Returns the angle (degrees), the imaginary magnitude r, and the
    sine-argument deviation epsilon, or None when the matrix does not fit.
    """
    arr = require_unitary(mat, "mat")
    if arr.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 matrix, got {arr.shape}")
    ok, phi, r, eps = _match_arrays(arr[None, :, :], accept_r)
    if not ok[0]:
        return None
    return RyMatch(angle_deg=float(phi[0]), r=float(r[0]), epsilon_deg=float(eps[0]))


@dataclass(frozen=True)
class AngleEntry:
    angle_deg: float
    r: float
    epsilon_deg: float
    length: int
    sequence: str


@dataclass
class AngleTable:
    policy: str
    sign: str
    max_length: int
    entries: list[AngleEntry]
    warning: str | None = None

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValidationError(f"unknown policy {self.policy!r}")
        if self.sign not in SIGNS:
            raise ValidationError(f"unknown sign {self.sign!r}")

    @property
    def angles(self) -> list[float]:
        return [e.angle_deg for e in self.entries]


@dataclass
class TableSet:
    positive_best_r: AngleTable
    positive_shortest: AngleTable
    negative_best_r: AngleTable
    negative_shortest: AngleTable

    def get(self, sign: str, policy: str) -> AngleTable:
        attr = {
            ("positive", "best_r_first"): "positive_best_r",
            ("positive", "shortest_first"): "positive_shortest",
            ("negative", "best_r_first"): "negative_best_r",
            ("negative", "shortest_first"): "negative_shortest",
        }.get((sign, policy))
        if attr is None:
            raise ValidationError(f"unknown table selector ({sign!r}, {policy!r})")
        return getattr(self, attr)

    def __iter__(self):
        yield self.positive_best_r
        yield self.positive_shortest
        yield self.negative_best_r
        yield self.negative_shortest


@dataclass
class _Cand:
    r: float
    epsilon: float
    length: int
    row: int


def _estimate_expand_bytes(frontier_rows: int, total_rows: int, largest_gen: int) -> int:
    """Rough peak-memory estimate for expanding one more generation."""
    chunk = min(frontier_rows, kernel.CHUNK_ROWS)
    transient = 6 * chunk * 500 + largest_gen * 200
    persistent = total_rows * 73 + frontier_rows * 6 * 81
    return transient + persistent


def _fold_rows(enc: np.ndarray) -> np.ndarray:
    """Replace each encoding by the lexicographically smallest of its eight
    global-phase rotations (w**j).  Study aid only; not used by the tables."""
    best = enc.copy()
    cur = enc
    for _ in range(7):
        rot = cur.copy()
        a = cur[:, 1:].reshape(-1, 2, 2, 4)
        b = rot[:, 1:].reshape(-1, 2, 2, 4)
        b[..., 0] = -a[..., 3]
        b[..., 1] = a[..., 0]
        b[..., 2] = a[..., 1]
        b[..., 3] = a[..., 2]
        diff = best != rot
        firstcol = np.where(diff.any(axis=1), diff.argmax(axis=1), 0)
        rows = np.arange(len(enc))
        take = rot[rows, firstcol] < best[rows, firstcol]
        best[take] = rot[take]
        cur = rot
    return best


def _dedup_by_class(enc_c, key_c, parent_c, gate_c):
    """Keep, per global-phase class, the candidate with the smallest word key.

    Returns the surviving rows twice over: the word-faithful encodings (whose
    matrices carry the phase their own word produces) and the folded class
    keys used for membership tests.  Mirrors the merge rule of
    ``kernel.sort_dedup_candidates`` with the fold as the equality relation.
    """
    folded_c = _fold_rows(enc_c)
    order = np.lexsort((key_c,) + tuple(folded_c[:, c] for c in range(kernel.ENC_WIDTH - 1, -1, -1)))
    folded_c = folded_c[order]
    first = np.empty(len(folded_c), dtype=bool)
    first[0] = True
    np.any(folded_c[1:] != folded_c[:-1], axis=1, out=first[1:])
    keep = order[first]
    return (
        np.ascontiguousarray(enc_c[keep]),
        np.ascontiguousarray(folded_c[first]),
        key_c[keep],
        parent_c[keep],
        gate_c[keep],
    )


def search(
    max_length: int,
    accept_r: float = 0.1,
    *,
    workers: int = 1,
    memory_budget: int | None = None,
    fold_phase: bool = False,
    progress=None,
) -> TableSet:
    """Breadth-first sequence search producing the four angle tables.

    ``workers`` partitions each frontier expansion; the result is identical
    for any worker count.  ``memory_budget`` (bytes, estimated) stops the
    search gracefully at the last completed length, recording a warning in
    the table headers.  ``progress`` is called as
    ``progress(length, new_rows, seen_rows)`` after each completed length.
    """
    if max_length < 1:
        raise ValidationError(f"max_length must be >= 1, got {max_length}")
    if not 0 < accept_r <= 0.5:
        raise ValidationError(f"accept_r must be in (0, 0.5], got {accept_r}")

    best: dict[int, _Cand] = {}
    shortest: dict[int, _Cand] = {}
    gens: list[tuple[np.ndarray, np.ndarray]] = []

    def ingest(enc_rows: np.ndarray, rank: np.ndarray, length: int) -> None:
        ok, phi, r, eps = _match_arrays(kernel.rows_to_complex(enc_rows), accept_r)
        idx = np.nonzero(ok)[0]
        if idx.size == 0:
            return
        keys = np.round(phi[idx] * _ANGLE_SCALE).astype(np.int64)
        order = np.lexsort((rank[idx], r[idx], keys))
        winner = np.empty(len(order), dtype=bool)
        winner[0] = True
        winner[1:] = keys[order][1:] != keys[order][:-1]
        for pos in np.nonzero(winner)[0]:
            j = order[pos]
            row = int(idx[j])
            cand = _Cand(r=float(r[idx[j]]), epsilon=float(eps[idx[j]]), length=length, row=row)
            for key in {int(keys[j]), -int(keys[j])} if abs(int(keys[j])) == 180 * _ANGLE_SCALE else {int(keys[j])}:
                old = best.get(key)
                if old is None or (cand.r, cand.length) < (old.r, old.length):
                    best[key] = cand
                if key not in shortest:
                    shortest[key] = cand

    frontier = kernel.identity_rows()
    rank = np.zeros(1, dtype=np.uint32)
    ingest(frontier, rank, 0)
    gen_arrays = [_fold_rows(frontier) if fold_phase else frontier.copy()]
    total_rows = 1
    completed = 0
    warning = None

    for length in range(1, max_length + 1):
        largest = max(arr.shape[0] for arr in gen_arrays)
        if memory_budget is not None and _estimate_expand_bytes(len(frontier), total_rows, largest) > memory_budget:
            warning = (
                f"memory budget reached: requested max_length={max_length}, "
                f"tables complete through length {completed}"
            )
            break
        if fold_phase:
            # Class-level dedup: equality is "equal up to global phase", but
            # the kept row is the word-faithful matrix of the smallest word
            # reaching each class, so acceptance still sees real phases.
            enc_c, key_c, parent_c, gate_c = kernel.expand_generation(frontier, rank, [], workers)
            if enc_c.shape[0]:
                enc_c, folded_c, key_c, parent_c, gate_c = _dedup_by_class(enc_c, key_c, parent_c, gate_c)
                fresh = ~kernel.member_mask(folded_c, gen_arrays)
            else:
                folded_c = enc_c
                fresh = np.zeros(0, dtype=bool)
            enc_rows, key, parent, gate = enc_c[fresh], key_c[fresh], parent_c[fresh], gate_c[fresh]
            stored = np.ascontiguousarray(folded_c[fresh])
        else:
            enc_rows, key, parent, gate = kernel.expand_generation(frontier, rank, gen_arrays, workers)
            stored = enc_rows
        if enc_rows.shape[0] == 0:
            completed = max_length
            break
        rank = np.empty(len(key), dtype=np.uint32)
        rank[np.argsort(key, kind="stable")] = np.arange(len(key), dtype=np.uint32)
        gens.append((parent, gate))
        gen_arrays.append(stored)
        total_rows += int(enc_rows.shape[0])
        ingest(enc_rows, rank, length)
        frontier = enc_rows
        completed = length
        if progress is not None:
            progress(length, int(enc_rows.shape[0]), total_rows)

    def word_for(cand: _Cand) -> str:
        symbols = []
        row = cand.row
        for level in range(cand.length, 0, -1):
            parent, gate = gens[level - 1]
            symbols.append(GATE_ORDER[gate[row]])
            row = int(parent[row])
        return "".join(reversed(symbols))

    def build(acc: dict[int, _Cand], policy: str, sign: str) -> AngleTable:
        if sign == "positive":
            keys = sorted(k for k in acc if k >= 0)
        else:
            keys = sorted(k for k in acc if k <= 0)
        entries = [
            AngleEntry(
                angle_deg=k / _ANGLE_SCALE,
                r=acc[k].r,
                epsilon_deg=acc[k].epsilon,
                length=acc[k].length,
                sequence=word_for(acc[k]),
            )
            for k in keys
        ]
        return AngleTable(policy=policy, sign=sign, max_length=completed, entries=entries, warning=warning)

    return TableSet(
        positive_best_r=build(best, "best_r_first", "positive"),
        positive_shortest=build(shortest, "shortest_first", "positive"),
        negative_best_r=build(best, "best_r_first", "negative"),
        negative_shortest=build(shortest, "shortest_first", "negative"),
    )


# ---------------------------------------------------------------------------
# Table files


def table_filename(sign: str, policy: str) -> str:
    return f"table_{sign}_{policy}.csv"


def write_table(path, table: AngleTable) -> None:
    lines = [f"# max_length={table.max_length}", f"# policy={table.policy}", f"# sign={table.sign}"]
    if table.warning:
        lines.append(f"# warning={table.warning}")
    lines.append("angle_deg,r,epsilon_deg,length,sequence")
    for e in table.entries:
        lines.append(f"{e.angle_deg:.3f},{e.r!r},{e.epsilon_deg!r},{e.length},{e.sequence}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path) -> AngleTable:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"table file not found: {path}")
    meta: dict[str, str] = {}
    entries = []
    header_seen = False
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
            continue
        if not header_seen:
            if line != "angle_deg,r,epsilon_deg,length,sequence":
                raise ValidationError(f"{path}:{lineno}: unexpected table header {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ValidationError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        try:
            entries.append(
                AngleEntry(
                    angle_deg=float(parts[0]),
                    r=float(parts[1]),
                    epsilon_deg=float(parts[2]),
                    length=int(parts[3]),
                    sequence=parts[4],
                )
            )
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    if not header_seen:
        raise ValidationError(f"{path}: missing table header")
    entries.sort(key=lambda e: e.angle_deg)
    try:
        return AngleTable(
            policy=meta.get("policy", ""),
            sign=meta.get("sign", ""),
            max_length=int(meta.get("max_length", "0")),
            entries=entries,
            warning=meta.get("warning"),
        )
    except ValueError as exc:
        raise ValidationError(f"{path}: bad metadata ({exc})") from exc


def write_tables(tables: TableSet, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for table in tables:
        path = out / table_filename(table.sign, table.policy)
        write_table(path, table)
        paths.append(path)
    return paths


def read_tables(tables_dir, policy: str) -> tuple[AngleTable, AngleTable]:
    """Load the (positive, negative) pair for one policy from a directory."""
    base = Path(tables_dir)
    pos = read_table(base / table_filename("positive", policy))
    neg = read_table(base / table_filename("negative", policy))
    return pos, neg


def table_summary(table: AngleTable) -> dict:
    """Angle count and successive-gap statistics for one table."""
    angles = table.angles
    gaps = [b - a for a, b in zip(angles, angles[1:])]
    return {
        "angle_count": len(angles),
        "mean_gap_deg": sum(gaps) / len(gaps) if gaps else 0.0,
        "max_gap_deg": max(gaps) if gaps else 0.0,
        "min_gap_deg": min(gaps) if gaps else 0.0,
        "gaps_over_1deg": sum(1 for g in gaps if g > 1.0),
    }


# ---------------------------------------------------------------------------
# Lookup and compilation


def lookup(table: AngleTable, phi: float, *, exclude_zero: bool = False) -> AngleEntry:
    """Entry whose angle is nearest to phi; ties prefer the smaller |angle|."""
    entries = [e for e in table.entries if e.angle_deg != 0.0] if exclude_zero else table.entries
    if not entries:
        raise ValidationError("angle table is empty")
    angles = [e.angle_deg for e in entries]
    pos = bisect.bisect_left(angles, phi)
    candidates = [entries[i] for i in (pos - 1, pos) if 0 <= i < len(entries)]
    return min(candidates, key=lambda e: (abs(e.angle_deg - phi), abs(e.angle_deg)))


@dataclass(frozen=True)
class ProgramRecord:
    sequence: str
    p: int
    q: int


@dataclass
class FtProgram:
    records: list[ProgramRecord] = field(default_factory=list)
    dim: int | None = None
    policy: str | None = None
    table_depth: int | None = None
    source: str | None = None

    @property
    def total_gate_count(self) -> int:
        return sum(len(r.sequence) for r in self.records)


def compile(d, tables: TableSet, policy: str = "best_r_first") -> FtProgram:
    """Lower a two-level decomposition to gate sequences via table lookup.

    Rotation ops route to the positive or negative table by angle sign; the
    sign-flip ops lower to the exact one-gate sequence "Z".  Zero-angle table
    entries are never consumed (a zero rotation is the identity and is
    dropped by the decomposition already).
    """
    pos = tables.get("positive", policy)
    neg = tables.get("negative", policy)
    records = []
    for op in d.ops:
        if op.kind == "ZGate" or (op.kind == "Phase" and abs(op.angle_deg - 180.0) < 1e-9):
            records.append(ProgramRecord("Z", op.p, op.q))
        elif op.kind == "Ry":
            if abs(op.angle_deg) < 1e-9:
                continue
            table = pos if op.angle_deg > 0 else neg
            entry = lookup(table, op.angle_deg, exclude_zero=True)
            records.append(ProgramRecord(entry.sequence, op.p, op.q))
        else:
            raise UnsupportedOperationError(
                f"op kind {op.kind} (angle {op.angle_deg}) has no sequence table in the real-operator scope"
            )
    return FtProgram(
        records=records,
        dim=d.padded_dim,
        policy=policy,
        table_depth=pos.max_length,
        source=getattr(d, "source", None),
    )


def effective_matrix(prog: FtProgram, dim: int | None = None) -> np.ndarray:
    """Multiply the embedded two-level factors of a program, in order.

    The first record is the leftmost matrix factor (the last applied to a
    state), matching the file order of program CSVs.
    """
    n = dim if dim is not None else prog.dim
    if n is None:
        raise ValidationError("program carries no dimension; pass dim explicitly")
    m = np.eye(n, dtype=np.complex128)
    for rec in prog.records:
        if not (1 <= rec.p < rec.q <= n):
            raise ValidationError(f"record targets ({rec.p}, {rec.q}) out of range for dim {n}")
        g = evaluate(rec.sequence).to_array()
        cp = m[:, rec.p - 1].copy()
        cq = m[:, rec.q - 1].copy()
        m[:, rec.p - 1] = cp * g[0, 0] + cq * g[1, 0]
        m[:, rec.q - 1] = cp * g[0, 1] + cq * g[1, 1]
    defect = np.abs(m.conj().T @ m - np.eye(n)).max()
    if not defect < 1e-9:
        raise InternalError(f"effective matrix lost unitarity (defect {defect:.3e})")
    return m


def write_program(path, prog: FtProgram) -> None:
    lines = []
    if prog.dim is not None:
        lines.append(f"# dim={prog.dim}")
    if prog.policy is not None:
        lines.append(f"# policy={prog.policy}")
    if prog.table_depth is not None:
        lines.append(f"# table_depth={prog.table_depth}")
    lines.append("sequence,p,q")
    for rec in prog.records:
        lines.append(f"{rec.sequence},{rec.p},{rec.q}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_program(path) -> FtProgram:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"program file not found: {path}")
    meta: dict[str, str] = {}
    records = []
    header_seen = False
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
            continue
        if not header_seen:
            if line != "sequence,p,q":
                raise ValidationError(f"{path}:{lineno}: unexpected program header {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ValidationError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
        seq = parts[0]
        if any(ch not in GATE_ORDER for ch in seq):
            raise ValidationError(f"{path}:{lineno}: invalid gate symbols in {seq!r}")
        try:
            p, q = int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        records.append(ProgramRecord(seq, p, q))
    if not header_seen:
        raise ValidationError(f"{path}: missing program header")
    dim = int(meta["dim"]) if "dim" in meta else None
    depth = int(meta["table_depth"]) if "table_depth" in meta else None
    return FtProgram(
        records=records,
        dim=dim,
        policy=meta.get("policy"),
        table_depth=depth,
        source=meta.get("source"),
    )

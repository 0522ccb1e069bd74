"""Coined discrete-time walk operators on undirected graphs.

The walker lives on directed edge states |j,k⟩ ("at vertex j, arrived from
or pointing toward k" — the orientation convention only has to be used
consistently).  One step applies a block-diagonal coin that mixes the states
leaving each vertex, then the shift that reverses every state:
``psi -> T @ C @ psi``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .matcore import UNITARY_TOL, as_matrix, require_unitary

__all__ = [
    "Graph",
    "EdgeStateIndex",
    "WalkOperator",
    "parse_graph_file",
    "parse_order_file",
    "load_coin_file",
    "grover_coin",
    "build_state_index",
    "build_walk_operator",
    "walk_step",
    "state_probabilities",
]


@dataclass(frozen=True)
class Graph:
    """An undirected graph with 1-based vertex labels; self-loops allowed."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValidationError("graph needs at least one vertex")
        seen = set()
        canon = []
        for j, k in self.edges:
            if not (1 <= j <= self.vertex_count and 1 <= k <= self.vertex_count):
                raise ValidationError(
                    f"edge ({j},{k}) outside vertex range 1..{self.vertex_count}"
                )
            key = (min(j, k), max(j, k))
            if key in seen:
                raise ValidationError(f"duplicate edge ({j},{k})")
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "edges", tuple(canon))

    @classmethod
    def star(cls, leaves: int, center: int | None = None) -> "Graph":
        """Star graph on ``leaves``+1 vertices; center defaults to the last label."""
        n = leaves + 1
        c = n if center is None else center
        others = [v for v in range(1, n + 1) if v != c]
        return cls(n, tuple((v, c) for v in others))


def parse_graph_file(path) -> Graph:
    """Read the plain-text format: ``vertices N`` then one ``j k`` line per edge."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror or exc}") from exc
    header = None
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "vertices" or not parts[1].isdigit():
                raise ValidationError(f"{path}:{lineno}: expected 'vertices N', got {raw!r}")
            header = int(parts[1])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 'j k', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: non-integer vertex in {raw!r}") from exc
    if header is None:
        raise ValidationError(f"{path}: missing 'vertices N' header")
    try:
        return Graph(header, tuple(edges))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class EdgeStateIndex:
    """Fixed total order over the directed states |j,k⟩ of a graph."""

    states: tuple[tuple[int, int], ...]
    position: dict[tuple[int, int], int] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(
            self, "position", {s: i for i, s in enumerate(self.states)}
        )
        if len(self.position) != len(self.states):
            raise ValidationError("state ordering repeats a directed state")

    @property
    def count(self) -> int:
        return len(self.states)


def _directed_states(g: Graph) -> set[tuple[int, int]]:
    out = set()
    for j, k in g.edges:
        out.add((j, k))
        out.add((k, j))  # same state twice for a self-loop
    return out


def build_state_index(g: Graph, order=None) -> EdgeStateIndex:
    """Order the directed states of ``g``.

    The default order sorts |j,k⟩ by (j, k).  ``order`` may supply an explicit
    sequence of directed pairs instead (it must be a permutation of the
    default state set) to match an externally fixed numbering.
    """
    expected = _directed_states(g)
    if order is None:
        return EdgeStateIndex(tuple(sorted(expected)))
    order = tuple((int(j), int(k)) for j, k in order)
    if set(order) != expected or len(order) != len(expected):
        raise ValidationError(
            "ordering override is not a permutation of the graph's directed states"
        )
    return EdgeStateIndex(order)


def parse_order_file(path) -> list[tuple[int, int]]:
    """Read an ordering override: one ``j k`` directed pair per line."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror or exc}") from exc
    pairs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 'j k', got {raw!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: non-integer vertex in {raw!r}") from exc
    if not pairs:
        raise ValidationError(f"{path}: empty ordering file")
    return pairs


def load_coin_file(path) -> dict[int, np.ndarray]:
    """Read per-vertex coins: JSON ``{vertex: {"re": [[..]], "im": [[..]]}}``."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise ValidationError(f"{path}: expected an object mapping vertex to matrix")
    coins = {}
    for key, value in payload.items():
        try:
            vertex = int(key)
            re = np.array(value["re"], dtype=np.float64)
            im = np.array(value.get("im", np.zeros_like(re)), dtype=np.float64)
        except (TypeError, KeyError, ValueError) as exc:
            raise ValidationError(f"{path}: malformed coin for vertex {key!r} ({exc})") from exc
        coins[vertex] = as_matrix(re + 1j * im, f"{path}[{key}]")
    return coins


def grover_coin(d: int) -> np.ndarray:
    """The d×d matrix with entries 2/d − δ_jk: real, symmetric, self-inverse."""
    if d < 1:
        raise ValidationError("coin dimension must be at least 1")
    return np.full((d, d), 2.0 / d) - np.eye(d)


@dataclass(frozen=True)
class WalkOperator:
    """One-step operator ``matrix = shift @ coin`` over an edge-state basis."""

    matrix: np.ndarray
    coin: np.ndarray
    shift: np.ndarray
    index: EdgeStateIndex

    @property
    def dim(self) -> int:
        return self.index.count


def build_walk_operator(g: Graph, coin_family="grover", idx: EdgeStateIndex | None = None) -> WalkOperator:
    """Assemble U = T·C for ``g``.

    ``coin_family`` is ``"grover"``, ``"identity"``, or a mapping from vertex
    to an explicit unitary whose dimension equals that vertex's outgoing-state
    count.  Coins mix the states that share a first vertex; the shift sends
    |j,k⟩ to |k,j⟩.
    """
    if idx is None:
        idx = build_state_index(g)
    elif set(idx.states) != _directed_states(g):
        raise ValidationError("state index does not belong to this graph")
    n = idx.count

    groups: dict[int, list[int]] = {}
    for pos, (j, _) in enumerate(idx.states):
        groups.setdefault(j, []).append(pos)

    coin = np.zeros((n, n), dtype=complex)
    for vertex, positions in groups.items():
        d = len(positions)
        if coin_family == "grover":
            block = grover_coin(d)
        elif coin_family == "identity":
            block = np.eye(d)
        else:
            try:
                block = coin_family[vertex]
            except (KeyError, TypeError, IndexError):
                raise ValidationError(f"no coin supplied for vertex {vertex}") from None
            block = as_matrix(block, f"coin[{vertex}]")
            if block.shape[0] != d:
                raise ValidationError(
                    f"coin for vertex {vertex} is {block.shape[0]}×{block.shape[0]}, "
                    f"but the vertex has {d} outgoing states"
                )
            require_unitary(block, name=f"coin[{vertex}]")
        coin[np.ix_(positions, positions)] = block

    shift = np.zeros((n, n))
    for pos, (j, k) in enumerate(idx.states):
        shift[idx.position[(k, j)], pos] = 1.0

    matrix = shift @ coin
    require_unitary(matrix, name="walk operator")
    return WalkOperator(matrix=matrix, coin=coin, shift=shift, index=idx)


def walk_step(op: WalkOperator, psi: np.ndarray) -> np.ndarray:
    """Apply one step of the walk to a unit state vector."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (op.dim,):
        raise ValidationError(f"state has shape {psi.shape}, operator needs ({op.dim},)")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > UNITARY_TOL:
        raise ValidationError(f"state norm {norm!r} is not 1")
    return op.matrix @ psi


def state_probabilities(psi: np.ndarray) -> np.ndarray:
    """|amplitude|² per basis state."""
    psi = np.asarray(psi, dtype=complex)
    return (psi.conj() * psi).real

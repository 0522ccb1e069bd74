"""Bundled reference data for the 8-star walk compilation example.

The package ships the example end to end: the graph, the two-level angle
decomposition of its walk operator, the gate program compiled from depth-37
tables, and the (4-decimal) real part of that program's effective matrix.
Everything here is plain data — loading functions only parse and validate.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .csd import Decomposition, read_decomposition
from .errors import ValidationError
from .synth import FtProgram, read_program
from .walkgen import Graph, WalkOperator, build_walk_operator, parse_graph_file

__all__ = [
    "star8_graph",
    "star8_operator",
    "reference_decomposition",
    "reference_program",
    "reference_approx_real",
]


def _load(name: str, loader):
    entry = resources.files("ftwalk.data").joinpath(name)
    with resources.as_file(entry) as path:
        return loader(path)


def star8_graph() -> Graph:
    """The 8-star: leaves 1..8, hub 9."""
    return _load("star8.txt", parse_graph_file)


def star8_operator() -> WalkOperator:
    """The 16×16 walk operator of the 8-star with the uniform mixing coin."""
    return build_walk_operator(star8_graph())


def reference_decomposition() -> Decomposition:
    """The published 34-op two-level angle set for the 8-star operator."""
    return _load("star8_decomposition.csv", read_decomposition)


def reference_program() -> FtProgram:
    """The published 763-gate program compiled from depth-37 best-r tables."""
    return _load("star8_program.csv", read_program)


def reference_approx_real() -> np.ndarray:
    """Real part (4 decimals) of the reference program's effective matrix."""
    payload = _load("star8_approx_real.json", lambda p: json.loads(p.read_text()))
    grid = np.array(payload["re"], dtype=np.float64)
    if grid.shape != (payload["dim"], payload["dim"]):
        raise ValidationError("reference matrix grid does not match its dim field")
    return grid

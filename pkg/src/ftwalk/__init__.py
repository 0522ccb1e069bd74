"""Compile coined quantum-walk operators into fault-tolerant gate programs.

Pipeline: build a walk operator from a graph and coin family (walkgen), pad
and decompose it into two-level rotations (csd), synthesize each rotation as a
sequence over the Steane-transversal gate set via exact breadth-first search
(synth), and validate the fault-tolerant gate protocols in a seven-qubit code
simulator (steane).  The ``ftwalk`` command wires the stages together.
"""

__version__ = "0.1.0"

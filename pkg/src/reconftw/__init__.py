"""Reconfiguration of vertex covers, odd cycle transversals and feedback vertex sets
(and their complements) on graphs of bounded treewidth."""

from __future__ import annotations

from .dp import SolveResult, solve
from .dp_ext import solve_variant
from .graph import (
    Graph,
    InputError,
    Instance,
    InstanceError,
    LengthMode,
    ProblemKind,
    Property,
    bfs_layers,
    check_feasible,
    check_witness,
    complement_instance,
    parse_graph,
    parse_instance,
    validate_instance,
)
from .oracle import bfs_reconfig, oracle_answer
from .planar import LayeredInstance, shift_solve
from .treedecomp import NiceTreeDecomposition, TreeDecomposition, min_fill_decompose, nicify, parse_td, validate_td

__all__ = [
    "Graph", "InputError", "Instance", "InstanceError", "LayeredInstance", "LengthMode",
    "NiceTreeDecomposition", "ProblemKind", "Property", "SolveResult", "TreeDecomposition",
    "bfs_layers", "bfs_reconfig", "check_feasible", "check_witness", "complement_instance",
    "min_fill_decompose", "nicify", "oracle_answer", "parse_graph", "parse_instance", "parse_td",
    "shift_solve", "solve", "solve_variant", "validate_instance", "validate_td",
]

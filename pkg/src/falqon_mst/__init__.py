"""Minimum spanning trees as a binary-polynomial Hamiltonian, minimized with a
feedback-based layered quantum evolution, and used for Optimum-Path Forest
prototype selection."""

__version__ = "0.1.0"

from .graph import (
    Sample,
    SpanningTree,
    WeightedGraph,
    build_complete_graph,
    exhaustive_mst,
    is_spanning_tree,
    prim_mst,
)
from .pubo import (
    BinaryPolynomial,
    DecodedSolution,
    PenaltyConfig,
    VariableLayout,
    build_h_a,
    build_h_b,
    build_h_mst,
    compile_diagonal,
    decode,
    evaluate,
    make_layout,
    tree_oracle,
)
from .statevector import (
    DiagonalOperator,
    DriverSpec,
    StateVector,
    apply_diagonal_phase,
    apply_driver_rotation,
    commutator_expectation,
    energy,
    init_plus_state,
    top_k_probabilities,
)
from .falqon import FalqonConfig, FalqonResult, FalqonTrace, dt_bound, run_falqon
from .opf import TrainedOpf, accuracy, classify, classify_all, select_prototypes, train
from .data import Dataset, SubsetSpec, load_csv, load_dataset, sample_subset

__all__ = [name for name in dir() if not name.startswith("_")]

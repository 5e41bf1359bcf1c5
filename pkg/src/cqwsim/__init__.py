"""Simulator of multiphoton emission from a biased chain of quantum wells.

The pipeline runs in stages: solve the single-well bound states and the
alignment bias, split the degenerate inter-well pairs by tunneling,
derive branching probabilities from dipoles and mode frequencies, run
the photon-counting cascade, and analyze or cross-check the resulting
distribution.
"""

from .analysis import (
    ConditionalState,
    LogicalProjection,
    ParityReport,
    PurityReport,
    conditional_state,
    entanglement_entropy,
    joint_pm,
    logical_qubit_projection,
    marginals,
    parity_xor,
    purity_check,
)
from .cascade import (
    CascadeState,
    InitialExcitation,
    JointDistribution,
    evolve_step,
    initial_state,
    run_cascade,
    support_partition,
    support_set,
    terminal_transition,
)
from .coupling import (
    BranchingModel,
    ChainWaves,
    CoupledLevels,
    DipoleIntegrals,
    DipoleMatrix,
    ModeFrequencies,
    assemble_dipoles,
    branching_model,
    couple_wells,
    dipole_integrals,
    dipole_matrix,
    mode_frequencies,
    sample_chain_waves,
    split_pair,
)
from .eigensolver import (
    BoundState,
    DesignResult,
    PiecewiseWave,
    WellParams,
    bisect_root,
    composite_grid,
    count_levels,
    count_nodes,
    design_alignment,
    evaluate_wave,
    sample_wavefunction,
    solve_bound_states,
    transcendental_residual,
)
from .errors import (
    CqwError,
    DomainError,
    InfeasibleDesignError,
    NumericError,
    SequencingError,
    SizeError,
    ValidationError,
)
from .oracle import (
    AuditReport,
    PathRecord,
    coherence_audit,
    enumerate_paths,
    iter_paths,
    sample_walks,
    tv_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "BoundState",
    "BranchingModel",
    "CascadeState",
    "ChainWaves",
    "ConditionalState",
    "CoupledLevels",
    "CqwError",
    "DesignResult",
    "DipoleIntegrals",
    "DipoleMatrix",
    "DomainError",
    "InfeasibleDesignError",
    "InitialExcitation",
    "JointDistribution",
    "LogicalProjection",
    "ModeFrequencies",
    "NumericError",
    "ParityReport",
    "PathRecord",
    "PiecewiseWave",
    "PurityReport",
    "SequencingError",
    "SizeError",
    "ValidationError",
    "WellParams",
    "assemble_dipoles",
    "bisect_root",
    "branching_model",
    "coherence_audit",
    "composite_grid",
    "conditional_state",
    "count_levels",
    "count_nodes",
    "couple_wells",
    "design_alignment",
    "dipole_integrals",
    "dipole_matrix",
    "entanglement_entropy",
    "enumerate_paths",
    "evaluate_wave",
    "evolve_step",
    "initial_state",
    "iter_paths",
    "joint_pm",
    "logical_qubit_projection",
    "marginals",
    "mode_frequencies",
    "parity_xor",
    "purity_check",
    "run_cascade",
    "sample_chain_waves",
    "sample_walks",
    "sample_wavefunction",
    "solve_bound_states",
    "split_pair",
    "support_partition",
    "support_set",
    "terminal_transition",
    "transcendental_residual",
    "tv_distance",
]

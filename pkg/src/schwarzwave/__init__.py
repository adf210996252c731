"""Schwarz alternating-method coupling of 1D elastic-wave FEM and OpInf models.

The package simulates longitudinal elastic waves in a 1D bar, either as a
single monolithic finite-element model or as two non-overlapping subdomain
models coupled through the Schwarz alternating method. Each subdomain can be
a full-order finite-element model or a non-intrusive operator-inference
reduced-order model; the interface exchange supports alternating
Dirichlet-Neumann, Robin-Robin, and Dirichlet-Dirichlet transmission
conditions.
"""

from .fem1d import (
    MaterialParams,
    Mesh1D,
    BcPartition,
    AssembledSystem,
    build_uniform_mesh,
    assemble_system,
    partition_system,
    interface_load_map,
    gaussian_ic,
    element_stress,
)
from .newmark import NewmarkParams, KinematicState, initial_acceleration, newmark_step
from .monolithic import ProblemConfig, Trajectory, run_monolithic, compute_sigma_max
from .transmission import (
    TransmissionSpec,
    InterfaceState,
    relax_lambda,
    robin_contributions,
    extract_traction,
)
from .schwarz import SchwarzRun, check_convergence, run_coupled
from .pod import SnapshotSet, PodBasis, compute_basis, project_state, reconstruct_state
from .opinf import RomOperators, TrainingSet, build_training_set, infer_operators
from .metrics import ErrorReport, step_error, average_error, iteration_stats

__version__ = "0.1.0"

__all__ = [
    "MaterialParams",
    "Mesh1D",
    "BcPartition",
    "AssembledSystem",
    "build_uniform_mesh",
    "assemble_system",
    "partition_system",
    "interface_load_map",
    "gaussian_ic",
    "element_stress",
    "NewmarkParams",
    "KinematicState",
    "initial_acceleration",
    "newmark_step",
    "ProblemConfig",
    "Trajectory",
    "run_monolithic",
    "compute_sigma_max",
    "TransmissionSpec",
    "InterfaceState",
    "relax_lambda",
    "robin_contributions",
    "extract_traction",
    "SchwarzRun",
    "check_convergence",
    "run_coupled",
    "SnapshotSet",
    "PodBasis",
    "compute_basis",
    "project_state",
    "reconstruct_state",
    "RomOperators",
    "TrainingSet",
    "build_training_set",
    "infer_operators",
    "ErrorReport",
    "step_error",
    "average_error",
    "iteration_stats",
]

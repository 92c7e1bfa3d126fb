"""Snapshot-based balanced truncation for linear time-periodic systems.

Model order reduction of stable discrete-time T-periodic systems:
empirical Gramian factors from impulse-response simulations, POD output
(or input) projections that keep the adjoint campaign small, balancing
by the method of snapshots, and an exact lifted-Lyapunov oracle plus a
benchmark harness for validation.
"""

from .balancing import (BalancedBasis, ReducedModel, balance,
                        exact_balanced_truncation, exact_balancing_basis,
                        reduce_from_lifted, reduce_model, simulate_reduced)
from .bench import (ExperimentConfig, ExperimentReport, SweepResult,
                    base_time_sweep, hinf_norm, random_system, run_experiment)
from .errors import (ConvergenceError, NumericalError, ReachabilityError,
                     StabilityError)
from .gramians import (GramianPair, SnapshotFactor, controllability_factor,
                       empirical_gramians, exact_gramians, lemma1_bound,
                       min_input_energy, observability_factor, output_energy,
                       solve_lyapunov_smith)
from .lifting import (ImpulseResponseBlocks, LiftedSystem, feedthrough_blocks,
                      lift, lifted_impulse_response)
from .projection import (PodProjection, ProjectionObjective,
                         apply_input_projection, dual_input_projection,
                         pod_output_projection, projection_objective,
                         reversed_transposed_system)
from .serialization import (load_system, save_system, system_from_doc,
                            system_to_doc)
from .system import (AdjointSystem, PeriodicSystem, Trajectory, adjoint_of,
                     monodromy, monodromy_spectral_radius, simulate,
                     transition)

__version__ = "0.1.0"

__all__ = [
    "AdjointSystem", "BalancedBasis", "ConvergenceError", "ExperimentConfig",
    "ExperimentReport", "GramianPair", "ImpulseResponseBlocks", "LiftedSystem",
    "NumericalError", "PeriodicSystem", "PodProjection", "ProjectionObjective",
    "ReachabilityError", "ReducedModel", "SnapshotFactor", "StabilityError",
    "SweepResult", "Trajectory", "adjoint_of", "apply_input_projection",
    "balance", "base_time_sweep", "controllability_factor",
    "dual_input_projection", "empirical_gramians", "exact_balanced_truncation",
    "exact_balancing_basis", "exact_gramians", "feedthrough_blocks",
    "hinf_norm", "lemma1_bound", "lift", "lifted_impulse_response",
    "load_system", "min_input_energy", "monodromy",
    "monodromy_spectral_radius", "observability_factor", "output_energy",
    "pod_output_projection", "projection_objective", "random_system",
    "reduce_from_lifted", "reduce_model", "reversed_transposed_system",
    "run_experiment", "save_system", "simulate", "simulate_reduced",
    "solve_lyapunov_smith", "system_from_doc", "system_to_doc", "transition",
]

"""qsteer: steering n-level quantum systems into arbitrary density matrices.

The scheme has two stages: engineered incoherent radiation relaxes every
initial state onto a diagonal state carrying the target spectrum, then a
fast unitary rotates that state into the target eigenbasis.  The same pair
of controls therefore sends *all* initial states to the one target -- the
physical realization of an all-to-one operator-sum map.
"""

__version__ = "0.1.0"

from .core import (C_SI, HBAR_SI, DensityMatrix, QSystem, bloch_vector,
                   density_from_pure, dipole_to_coupling, hs_distance,
                   matrix_exp, random_density_matrix, random_generic_system,
                   random_pure_state, spectral_decomposition)
from .dynamics import (Liouvillian, SpectralDensity, build_dissipator,
                       coherence_decay_rates, energy_density, pauli_generator,
                       propagate, stationary_state, unvec, vec)
from .coherent import (Pulse, apply_unitary, basis_rotation_unitary,
                       lie_algebra_rank, max_step, pi_pulse_duration,
                       propagate_coherent, pulse_unitary, scan_pulse_duration)
from .engineering import (AllToOneReport, EngineeringPlan, EngineeringReport,
                          PlanConfig, execute, plan, random_input_states,
                          stage1_duration, synthesize_spectral_density,
                          verify_all_to_one)
from .kraus import (KrausMap, all_to_one_map, apply_map, choi_matrix,
                    compare_map_to_scheme, is_completely_positive)
from .scenario import Scenario, bundled_scenario, load_scenario, load_system
from .errors import (InfeasiblePlanError, NonUniqueSteadyStateError,
                     QSteerError, ScenarioError, UncontrollableSystemError,
                     ZeroGapError)

__all__ = [name for name in dir() if not name.startswith("_")]

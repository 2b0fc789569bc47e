"""Oscillator-based Ising machine simulator with SHIL architecture models."""

__version__ = "0.1.0"

from ._backend import available as available_backends
from .baselines import BaselineResult, TabuConfig, brute_force_maxcut, greedy_maxcut, tabu_maxcut
from .dynamics import (DynamicsConfig, PhaseState, PhaseTrajectory, binarize, common_mode,
                       in_band, initial_state, integrate, lyapunov_energy, rhs)
from .errors import (CapacityError, ConfigError, ContractError, IntegrationError, OimError,
                     SizeGuardError)
from .harness import (BENCHMARK_DYNAMICS, PowerModel, ProblemSpec, RunConfig, RunMetrics,
                      energy_to_solution, run_corner_matrix, run_single)
from .ising import (Graph, IsingProblem, cut_size, hamiltonian, kings_graph, maxcut_to_ising,
                    read_problem, write_problem)
from .pvt import (DeviationSet, SensitivityModel, VariationScenario, apply_variation,
                  corner_suite)
from .shil import ShilPlan, ShilSource, ShilSystem, build_shil, plan, utilization_threshold

"""Swarming-oscillator simulations: clustering, flocking, synchronization."""

__version__ = "0.1.0"

from .core import (
    MODEL_BASELINE,
    MODEL_SCS,
    MODEL_SV,
    AgentStateSCS,
    AgentStateSV,
    ModelParams,
    SystemState,
    phi_E,
    phi_theta_summand,
    phi_v,
    phi_xi_summand,
    wrap_angle,
)
from .neighbors import NeighborList, neighbor_list, neighbors_grid, neighbors_naive
from .dynamics import Derivative, ModelOde, rhs_baseline, rhs_scs, rhs_sv
from .integrators import (
    IntegratorConfig,
    SolverError,
    SolverStats,
    Trajectory,
    integrate,
    step_rk4,
)
from .observables import (
    ClassifierThresholds,
    ObservableSummary,
    classify,
    cluster_count,
    heading_R,
    kuramoto_R,
    phase_wave_S,
    summarize,
)
from .config import ConfigError, InitSpec, SimConfig, init_random, load_config
from .simulate import RunResult, run_config
from .sweep import expand_grid, run_sweep

__all__ = [
    "__version__",
    "MODEL_BASELINE",
    "MODEL_SCS",
    "MODEL_SV",
    "AgentStateSCS",
    "AgentStateSV",
    "ModelParams",
    "SystemState",
    "phi_E",
    "phi_theta_summand",
    "phi_v",
    "phi_xi_summand",
    "wrap_angle",
    "NeighborList",
    "neighbor_list",
    "neighbors_grid",
    "neighbors_naive",
    "Derivative",
    "ModelOde",
    "rhs_baseline",
    "rhs_scs",
    "rhs_sv",
    "IntegratorConfig",
    "SolverError",
    "SolverStats",
    "Trajectory",
    "integrate",
    "step_rk4",
    "ClassifierThresholds",
    "ObservableSummary",
    "classify",
    "cluster_count",
    "heading_R",
    "kuramoto_R",
    "phase_wave_S",
    "summarize",
    "ConfigError",
    "InitSpec",
    "SimConfig",
    "init_random",
    "load_config",
    "RunResult",
    "run_config",
    "expand_grid",
    "run_sweep",
]

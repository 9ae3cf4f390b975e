"""Simulator for quantum walks and walk search driven by layered XY gates
on cycles and tori, with ideal and Lindblad-noisy backends."""

from .gates import (
    AngleSchedule,
    GateSpec,
    StepOperator,
    apply_single_qubit,
    apply_two_qubit,
    build_step_operator,
    pauli_rotation,
    xy_gate,
)
from .lattice import (
    Lattice,
    Tessellation,
    build_cycle_tessellations,
    build_torus_tessellations,
    tessellations_for,
)
from .metrics import (
    MetricSeries,
    degraded_ratio,
    hellinger_fidelity,
    hitting_time,
    l1_distance,
    selectivity,
    success_probability,
)
from .noise import (
    DEFAULT_FIDELITY_TARGETS,
    CalibrationResult,
    GateChannel,
    NoiseModel,
    average_gate_fidelity,
    calibrate_rates,
    evolve_density,
    idle_channel,
    lindblad_rhs,
    noisy_gate_channel,
    trajectory_run,
)
from .states import (
    LEAKAGE,
    DensityMatrix,
    Distribution,
    SectorState,
    StateVector,
    onehot_index,
    onehot_vertex,
    sample_counts,
    sector_project,
)
from .walks import (
    InitSpec,
    ResourceLimitError,
    WalkBackend,
    WalkConfig,
    WalkResult,
    qw_init,
    run_walk,
    search_initializer,
    search_initializer_gates,
    sector_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "AngleSchedule",
    "CalibrationResult",
    "DEFAULT_FIDELITY_TARGETS",
    "DensityMatrix",
    "Distribution",
    "GateChannel",
    "GateSpec",
    "InitSpec",
    "LEAKAGE",
    "Lattice",
    "MetricSeries",
    "NoiseModel",
    "ResourceLimitError",
    "SectorState",
    "StateVector",
    "StepOperator",
    "Tessellation",
    "WalkBackend",
    "WalkConfig",
    "WalkResult",
    "apply_single_qubit",
    "apply_two_qubit",
    "average_gate_fidelity",
    "build_cycle_tessellations",
    "build_step_operator",
    "build_torus_tessellations",
    "calibrate_rates",
    "degraded_ratio",
    "evolve_density",
    "hellinger_fidelity",
    "hitting_time",
    "idle_channel",
    "l1_distance",
    "lindblad_rhs",
    "noisy_gate_channel",
    "onehot_index",
    "onehot_vertex",
    "pauli_rotation",
    "qw_init",
    "run_walk",
    "sample_counts",
    "search_initializer",
    "search_initializer_gates",
    "sector_oracle",
    "sector_project",
    "selectivity",
    "success_probability",
    "tessellations_for",
    "trajectory_run",
    "xy_gate",
]

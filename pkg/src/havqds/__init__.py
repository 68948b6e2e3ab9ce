"""Hybrid real/imaginary-time adaptive variational dynamics for SK optimization."""

from .pauli import (
    PauliString,
    WeightedPauliSum,
    apply_pauli,
    apply_rotation,
    apply_sum,
    basis_state,
    cnot_cost,
    expectation,
    plus_state,
    variance,
)
from .models import (
    OperatorPool,
    SkInstance,
    build_h_ad,
    build_h_cd1,
    build_h_driver,
    build_h_problem,
    build_pool,
    cd_alpha1,
    sample_sk,
    schedule_s,
    schedule_sdot,
)
from .exact import (
    approximation_ratio,
    evolve_exact,
    extremal_eigenvalues,
    ground_state_probability,
    imaginary_filter_exact,
    low_spectrum,
)
from .trotter import GateTally, dilemma_sweep, run_trotter
from .variational import (
    Ansatz,
    GeometrySnapshot,
    adaptive_expand,
    derivative_states,
    geometry_snapshot,
    imaginary_time_step,
    imagtime_geometry,
    mclachlan_distance,
    real_time_step,
    realtime_geometry,
    solve_regularized,
)
from .driver import RunConfig, RunResult, TrajectoryRecord, run_avqds_only, run_havqds

__version__ = "0.1.0"

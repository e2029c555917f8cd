"""Asynchronous decentralized primal-dual solvers with communication sliding."""

from .graph import (
    Topology,
    TopologyError,
    apply_laplacian_row,
    build_topology,
    feasibility_residual,
    load_edge_list,
    save_edge_list,
)
from .metrics import (
    ReferenceNotConvergedError,
    ReferenceSolution,
    RunTrace,
    centralized_reference,
    gap_function_Q,
    perturbed_gap,
    primal_gap,
    rate_slope,
)
from .problems import (
    AgentObjective,
    Dataset,
    EuclideanProx,
    ParseError,
    ProblemClassConstants,
    UnsupportedProblemError,
    ball_projection,
    bregman_prox_step,
    bregman_prox_step2,
    hinge_subgradient,
    hinge_value,
    load_libsvm,
    make_quadratic_problem,
    make_svm_problem,
    partition_evenly,
)
from .schedules import (
    InnerSchedule,
    OuterSchedule,
    ScheduleInfeasibleError,
    adpd_schedule,
    aasdcs_convex_schedule,
    aasdcs_strong_schedule,
    inner_schedule,
    theta_from_theta_hat,
    validate_schedule,
)
from .solver_adpd import NetworkState, adpd_run, adpd_step
from .solver_aasdcs import SlidingState, aasdcs_run, aasdcs_step, acs_procedure

__version__ = "0.1.0"

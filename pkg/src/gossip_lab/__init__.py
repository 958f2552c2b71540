"""Deterministic simulator and autonomic tuner for permutation-driven
all-to-all gossiping schedules."""

from .core import (
    Action,
    ChannelProfile,
    Metrics,
    PermutationSpec,
    RunTable,
    validate_permutation,
    validate_run_table,
)
from .engine import RunSummary, simulate, simulate_metrics
from .fsa import (
    FsaProgram,
    HybridSpec,
    compose_fsa,
    homogeneous_assignment,
    hybrid_assignment,
    identity_permutation,
    pipelined_permutation,
)
from .metrics import (
    asymptotic_mu_identity,
    closed_form_length_identity,
    closed_form_length_pipelined,
    closed_form_mu_pipelined,
    efficiency,
    mean_slot_utilization,
    metrics_for,
    run_length,
    utilization_string,
)
from .autotune import (
    MapeController,
    ParallelismMap,
    SenseProvider,
    build_lookup_table,
    compute_mu,
    run_session,
    sense,
    tune_adaptive,
    tune_lookup,
)

__version__ = "0.1.0"

"""k-point effective schedulability tests for fixed-priority and global RM scheduling."""

from .core import (
    KPointInstance,
    extreme_points_bound,
    extreme_points_threshold,
    hyperbolic_bound,
    hyperbolic_threshold,
    utilization_bound_constrained,
    utilization_bound_exclusive,
)
from .factors import FactorResult, solve_capacity_factor, solve_speedup_factor
from .kernels import BACKEND
from .multiproc import (
    RM_US_THRESHOLD,
    GlobalSetup,
    bertogna_test,
    build_global_setup,
    fast_monotonic_test,
    grm_closed_form_test,
    grm_naive_test,
    grm_tight_test,
    rm_us_classify,
    workload_w,
)
from .rta_bounds import RtBoundResult, rt_bound_hyperbolic, rt_bound_linear
from .taskmodel import (
    Task,
    TaskModelError,
    TaskSet,
    Verdict,
    beta_bound,
    generate_taskset,
    parse_taskset,
    phi,
    serialize_taskset,
    utilization_summary,
)
from .uniproc import (
    ConstrainedKPointSetup,
    build_kpoint_constrained,
    busy_window_sufficient,
    dbf,
    edf_dbf_feasible,
    fp_hyperbolic_test,
    rta_fixed_point,
    speedup_witness,
    tda_exact,
)

__version__ = "0.1.0"

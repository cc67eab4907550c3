"""Pull/push coexistence MAC for content-based wake-up (CoWu) IoT networks.

Closed-form metrics (:mod:`cowu.metrics`) built on an absorbing contention
chain (:mod:`cowu.chain`), a frame-level Monte Carlo simulator
(:mod:`cowu.sim`) and grid-search optimizers (:mod:`cowu.opt`).
"""

__version__ = "0.1.0"

from cowu.chain import ContentionChain, propagate, success_pmf, success_table
from cowu.core import (
    FrameSplit,
    QueryRange,
    SystemConfig,
    UniformObservation,
    make_frame_split,
    push_activity_probability,
    wake_probability,
)
from cowu.errors import DomainError, InfeasibleError
from cowu.metrics import (
    CoexistenceReport,
    MetricInputs,
    evaluate,
    gamma_u,
    gamma_w,
    pull_energy_total,
    rr_gamma_u,
    rr_pull_energy,
)
from cowu.opt import GridSpec, alpha_opt, energy_ratio, lambda_max, sweep
from cowu.sim import run_campaign, run_frame, run_rr_campaign

__all__ = [
    "CoexistenceReport",
    "ContentionChain",
    "DomainError",
    "FrameSplit",
    "GridSpec",
    "InfeasibleError",
    "MetricInputs",
    "QueryRange",
    "SystemConfig",
    "UniformObservation",
    "alpha_opt",
    "energy_ratio",
    "evaluate",
    "gamma_u",
    "gamma_w",
    "lambda_max",
    "make_frame_split",
    "propagate",
    "pull_energy_total",
    "push_activity_probability",
    "rr_gamma_u",
    "rr_pull_energy",
    "run_campaign",
    "run_frame",
    "run_rr_campaign",
    "success_pmf",
    "success_table",
    "sweep",
    "wake_probability",
]

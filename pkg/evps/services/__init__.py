"""Sweep drivers, point pipeline, post-processing and export."""

from .optima import locate_optima, loss_thresholds
from .pipeline import evaluate_composite, evaluate_direct, evaluate_point
from .sweeps import run_k_sweep, run_loss_sweep, run_n_sweep, run_r_sweep, run_sweep

__all__ = [
    "evaluate_composite",
    "evaluate_direct",
    "evaluate_point",
    "run_k_sweep",
    "run_n_sweep",
    "run_loss_sweep",
    "run_r_sweep",
    "run_sweep",
    "locate_optima",
    "loss_thresholds",
]

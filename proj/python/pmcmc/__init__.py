"""Particle Metropolis-Hastings inference for nonlinear state space models."""

from pmcmc._core import (
    RngStream,
    autocorrelation,
    inefficiency_factor,
    kalman,
    posterior_summary,
    run_pmh,
    sample_stable,
    simulate,
    smc,
)

__all__ = [
    "RngStream",
    "autocorrelation",
    "inefficiency_factor",
    "kalman",
    "posterior_summary",
    "run_pmh",
    "sample_stable",
    "simulate",
    "smc",
]

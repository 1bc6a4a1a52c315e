"""Leggett-Garg two-time quasiprobabilities for a qubit coupled to an oscillator by gravity."""

from .closed_form import (
    correlation,
    expect_q,
    kernel_alpha_beta,
    kernel_theta,
    min_quasiprob_predicted,
    negativity_closed,
    quasiprob,
    quasiprob_negativity_form,
    quasiprob_small_lambda,
)
from .model import (
    CoherentSuperposition,
    Ground,
    ModelParams,
    PhysicalSetup,
    QuasiResult,
    Squeezed,
    Thermal,
    dimensionless_from_si,
    reference_setup,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "CoherentSuperposition",
    "Ground",
    "ModelParams",
    "PhysicalSetup",
    "QuasiResult",
    "Squeezed",
    "Thermal",
    "correlation",
    "dimensionless_from_si",
    "expect_q",
    "kernel_alpha_beta",
    "kernel_theta",
    "min_quasiprob_predicted",
    "negativity_closed",
    "quasiprob",
    "quasiprob_negativity_form",
    "quasiprob_small_lambda",
    "reference_setup",
    "validate",
]

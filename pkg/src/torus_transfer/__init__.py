"""Ensemble-control construction of approximate state transfers for a
Schrödinger equation on the circle.

A state transfer ``psi0 -> |DP|^{1/2} psi0(P)`` is reduced to approximating a
circle diffeomorphism ``P`` by the flow of the control-affine field
``u0 + u1 sin(x) + u2 sin(2x)``, discretized by explicit Euler on a lattice of
particles and optimized with an exact discrete-adjoint gradient.
"""

__version__ = "0.1.0"

from .flow import (
    ControlSchedule,
    EnsembleLattice,
    EnsembleTrajectory,
    ParticleTrajectory,
    StepGuardViolation,
    ensemble_sweep,
    euler_sweep,
    reference_flow,
)
from .objective import ObjectiveReport, objective, pushforward_at, transfer_error
from .adjoint import finite_difference_check, gradient
from .optimizer import OptimizerConfig, descend, random_init, sweep_alpha, sweep_lattice
from .states import ABS_COS, COS3, GROUND, StateFunction, get_target
from .torus import combined_field, field_derivative, field_value, wrap

__all__ = [
    "ABS_COS", "COS3", "GROUND", "ControlSchedule", "EnsembleLattice", "EnsembleTrajectory",
    "ObjectiveReport", "OptimizerConfig", "ParticleTrajectory", "StateFunction",
    "StepGuardViolation", "combined_field", "descend", "ensemble_sweep", "euler_sweep",
    "field_derivative", "field_value", "finite_difference_check", "get_target", "gradient",
    "objective", "pushforward_at", "random_init", "reference_flow", "sweep_alpha",
    "sweep_lattice", "transfer_error", "wrap",
]

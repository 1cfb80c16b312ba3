"""Design and verification toolkit for moving-trap transport without residual excitation."""

__version__ = "0.1.0"

from .designer import (
    AuxiliaryFunction,
    PhysicalUnits,
    TransportProtocol,
    TransportSpec,
    build_acceleration,
    build_trajectory,
    endpoint_residuals,
    load_protocol,
    make_auxiliary,
    save_protocol,
    verify_boundary_conditions,
)
from .errors import (
    AccuracyWarning,
    BoundaryLeakError,
    BracketWarning,
    ConsistencyError,
    GridError,
    ResolutionWarning,
    SpecError,
)
from .evaluator import (
    ClassicalResult,
    ExcitationCurve,
    classical_simulate,
    complex_amplitude,
    excitation_curve,
    final_excitation,
    flatness_order,
    fourier_accel,
    fourier_factorized,
    lambda_metric,
)
from .optimizer import (
    OptimizationResult,
    PlacementPattern,
    SweepResult,
    optimize_epsilon,
    sweep_epsilon,
)
from .polycalc import Polynomial, SymmetricCoefficients, symmetric_coefficients
from .qsim import (
    SpatialGrid,
    WaveFunction,
    analytic_solution,
    energy_expectation,
    fidelity,
    ground_state,
    make_grid,
    propagate,
    verification_report,
)

__all__ = [
    "AuxiliaryFunction",
    "PhysicalUnits",
    "TransportProtocol",
    "TransportSpec",
    "build_acceleration",
    "build_trajectory",
    "endpoint_residuals",
    "load_protocol",
    "make_auxiliary",
    "save_protocol",
    "verify_boundary_conditions",
    "AccuracyWarning",
    "BoundaryLeakError",
    "BracketWarning",
    "ConsistencyError",
    "GridError",
    "ResolutionWarning",
    "SpecError",
    "ClassicalResult",
    "ExcitationCurve",
    "classical_simulate",
    "complex_amplitude",
    "excitation_curve",
    "final_excitation",
    "flatness_order",
    "fourier_accel",
    "fourier_factorized",
    "lambda_metric",
    "OptimizationResult",
    "PlacementPattern",
    "SweepResult",
    "optimize_epsilon",
    "sweep_epsilon",
    "Polynomial",
    "SymmetricCoefficients",
    "symmetric_coefficients",
    "SpatialGrid",
    "WaveFunction",
    "analytic_solution",
    "energy_expectation",
    "fidelity",
    "ground_state",
    "make_grid",
    "propagate",
    "verification_report",
]

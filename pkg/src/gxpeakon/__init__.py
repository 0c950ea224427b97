"""Forward and inverse spectral maps for interlacing two-component peakons.

The main entry points are :func:`forward_map` (configuration to spectral data),
:func:`inverse_map` (back again) and :func:`trajectories` (time evolution by
linear flow of the spectral data).
"""

from .core_types import (
    AdjointResidues,
    ExactConfiguration,
    ExtendedConfiguration,
    GXError,
    InterlacingConfiguration,
    IntervalMeasures,
    NumericalDegeneracyError,
    RecoveryError,
    SpectralData,
    ValidationError,
    from_interval,
    to_interval,
    validate_admissible,
)
from .dynamics import conserved_coefficients, evolve_spectral, rk4_trajectory, trajectories
from .forward_spectral import adjoint_residues, eigenvalues, forward_map, residues, weyl_functions
from .inverse_spectral import inverse_map, recover_interval, recover_interval_K1, recover_K1, recover_realline
from .transition import Polynomial, PolynomialMatrix, evaluate_wavefunction, transition_matrix

__version__ = "0.1.0"

__all__ = [
    "AdjointResidues",
    "ExactConfiguration",
    "ExtendedConfiguration",
    "GXError",
    "InterlacingConfiguration",
    "IntervalMeasures",
    "NumericalDegeneracyError",
    "Polynomial",
    "PolynomialMatrix",
    "RecoveryError",
    "SpectralData",
    "ValidationError",
    "adjoint_residues",
    "conserved_coefficients",
    "eigenvalues",
    "evaluate_wavefunction",
    "evolve_spectral",
    "forward_map",
    "from_interval",
    "inverse_map",
    "recover_K1",
    "recover_interval_K1",
    "recover_interval",
    "recover_realline",
    "residues",
    "rk4_trajectory",
    "to_interval",
    "trajectories",
    "transition_matrix",
    "validate_admissible",
    "weyl_functions",
]

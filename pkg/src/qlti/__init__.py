"""Quantum linear time-invariant systems over a sampled frequency grid."""

from .core import (
    DEFAULT_TOL,
    FrequencyGrid,
    GridMismatchError,
    GuardError,
    MatrixFunction,
    NumericalError,
    OffGridError,
    QltiError,
    conjugate_symplectic_residual,
    group_inverse,
    is_conjugate_symplectic,
    ladder_map,
    random_group_element,
    symplectic_form,
)

__version__ = "0.1.0"

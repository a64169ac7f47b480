"""Quasi-exactly solvable models: SUSY construction, sl(2) decomposition, spectra."""

from ._qeskit import (
    DecompositionError,
    DomainError,
    Model,
    UsageError,
    decompose,
    model,
    quartic_equivalence,
    run_cli,
    scalar_mode_residuals,
    spectrum,
    verify_eigenstate,
)

__all__ = [
    "DecompositionError",
    "DomainError",
    "Model",
    "UsageError",
    "decompose",
    "model",
    "quartic_equivalence",
    "run_cli",
    "scalar_mode_residuals",
    "spectrum",
    "verify_eigenstate",
]

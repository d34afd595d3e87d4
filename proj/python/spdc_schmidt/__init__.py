"""Schmidt decomposition of the transverse two-photon amplitude."""

from ._core import (
    AccuracyError,
    ContractError,
    Decomposition,
    DomainError,
    Error,
    FitError,
    LookupError,
    NumericalError,
    RangeError,
    ShapeError,
    TruncationError,
    UnsupportedKindError,
    alpha_from_1e_criterion,
    amplitude,
    decompose,
    fit_rescaling,
    gaussian_schmidt_number,
    radial_kernel,
    rescaled_schmidt_number,
)

__all__ = [
    "AccuracyError",
    "ContractError",
    "Decomposition",
    "DomainError",
    "Error",
    "FitError",
    "LookupError",
    "NumericalError",
    "RangeError",
    "ShapeError",
    "TruncationError",
    "UnsupportedKindError",
    "alpha_from_1e_criterion",
    "amplitude",
    "decompose",
    "fit_rescaling",
    "gaussian_schmidt_number",
    "radial_kernel",
    "rescaled_schmidt_number",
]

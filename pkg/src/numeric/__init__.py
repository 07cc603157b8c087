"""Scaled arithmetic and transform-based coefficient extraction."""

from .scaled import ScaledComplex, ScaledVector
from .dft import (
    AffineFactor,
    convolution_expand,
    evaluate_at_roots,
    extract_coefficients,
    factors_for,
    inverse_dft_coefficients,
    inverse_dft_scaled,
)

__all__ = [
    "ScaledComplex",
    "ScaledVector",
    "AffineFactor",
    "convolution_expand",
    "evaluate_at_roots",
    "extract_coefficients",
    "factors_for",
    "inverse_dft_coefficients",
    "inverse_dft_scaled",
]

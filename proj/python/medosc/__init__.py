"""Median oscillation decompositions on dyadic grids."""

from ._medosc import (
    MedoscError,
    best_constant_osc,
    decompose,
    generate,
    generator_kinds,
    haar_coefficients,
    hilbert_transform,
    median,
    run_check,
    sharp_max_field,
    verify,
)

__all__ = [
    "MedoscError",
    "best_constant_osc",
    "decompose",
    "generate",
    "generator_kinds",
    "haar_coefficients",
    "hilbert_transform",
    "median",
    "run_check",
    "sharp_max_field",
    "verify",
]

"""Shapelet scale conventions.

Scale coefficients relate a shapelet's ``beta`` to the pattern length scale
through the reduced wavelength ``lambda / (2 pi)``, i.e. the inverse of the
pattern wavenumber:

    beta = C * lambda / (2 pi)

With this convention the optimal ``C`` of an ``(n=0, m)`` shapelet on a
one-mode pattern is close to ``sqrt(m + 1)``.
"""

from __future__ import annotations

import math

from .shapelets import ShapeletIndex

__all__ = [
    "REFERENCE_COEFFICIENTS",
    "DEFAULT_ORDERS",
    "reduced_wavelength",
    "beta_for",
    "default_shapelet_set",
]

#: published response-maximising coefficients for (n=0, m)
REFERENCE_COEFFICIENTS = {
    ShapeletIndex(0, 1): 1.418,
    ShapeletIndex(0, 2): 1.725,
    ShapeletIndex(0, 3): 2.003,
    ShapeletIndex(0, 4): 2.224,
    ShapeletIndex(0, 5): 2.439,
    ShapeletIndex(0, 6): 2.640,
}

DEFAULT_ORDERS = (1, 2, 3, 4, 5, 6)


def reduced_wavelength(wavelength: float) -> float:
    return wavelength / (2.0 * math.pi)


def beta_for(coefficient: float, wavelength: float) -> float:
    """Shapelet scale in pixels for a coefficient and a wavelength in pixels."""
    return coefficient * reduced_wavelength(wavelength)


def default_shapelet_set(coefficients=None):
    """``[(ShapeletIndex, C), ...]`` for n=0, m=1..6."""
    coefficients = REFERENCE_COEFFICIENTS if coefficients is None else coefficients
    return [(ShapeletIndex(0, m), coefficients[ShapeletIndex(0, m)]) for m in DEFAULT_ORDERS]

"""Polar shapelet kernels.

A polar shapelet of radial order ``n`` and angular order ``m`` at scale
``beta`` (pixels) is

    B(r, theta) = beta**-1 * chi(r / beta) * exp(-1j * m * theta)
    chi(r)      = r**m * L_n^m(r**2) * exp(-r**2 / 2)

where ``L_n^m`` is the associated Laguerre polynomial.  Kernels are sampled
at pixel centres on an odd-sided square grid, with ``theta = atan2(y, x)``
measured in image coordinates (row index ``y`` grows downward), truncated to
a disc, made exactly zero-mean for ``m >= 1`` and scaled to unit discrete L2
norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidConfiguration

__all__ = [
    "ShapeletIndex",
    "ShapeletKernel",
    "DEFAULT_SUPPORT_FACTOR",
    "MIN_SUPPORT_FACTOR",
    "eval_assoc_laguerre",
    "chi_radial_unnorm",
    "kernel_grid",
    "render_kernel",
    "steer_kernel",
]

#: kernels are truncated at ``DEFAULT_SUPPORT_FACTOR * beta`` unless told otherwise
DEFAULT_SUPPORT_FACTOR = 5.0
MIN_SUPPORT_FACTOR = 3.0


class ShapeletIndex(NamedTuple):
    """Radial order ``n`` and angular order ``m`` of a polar shapelet."""

    n: int
    m: int

    def validate(self) -> "ShapeletIndex":
        if int(self.n) != self.n or int(self.m) != self.m or self.n < 0 or self.m < 0:
            raise InvalidConfiguration(f"shapelet indices must be nonnegative integers, got {tuple(self)}")
        return self


def eval_assoc_laguerre(n, m, x):
    """Associated Laguerre polynomial ``L_n^m(x)``.

    Uses the upward three-term recurrence

        (k + 1) L_{k+1} = (2k + 1 + m - x) L_k - (k + m) L_{k-1}

    starting from ``L_0 = 1`` and ``L_1 = 1 + m - x``.

    Parameters
    ----------
    n, m : int
        Nonnegative degree and order.
    x : float or array_like
        Evaluation points.

    Returns
    -------
    float or numpy.ndarray
        Same shape as ``x``.
    """
    ShapeletIndex(n, m).validate()
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + m - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + m - x) * cur - (k + m) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def chi_radial_unnorm(index: ShapeletIndex, r):
    """Radial profile ``r**m * L_n^m(r**2) * exp(-r**2/2)`` without its constant."""
    n, m = ShapeletIndex(*index).validate()
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    out = r**m * eval_assoc_laguerre(n, m, r * r) * np.exp(-0.5 * r * r)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ShapeletKernel:
    """A rendered, unit-norm complex shapelet on an odd-sided pixel grid."""

    index: ShapeletIndex
    beta: float
    support_radius: float
    values: np.ndarray

    @property
    def m(self) -> int:
        return self.index.m

    @property
    def half_width(self) -> int:
        return self.values.shape[0] // 2

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def kernel_grid(support_radius: float):
    """Pixel-centre offsets ``(x, y)`` of a square grid of side ``2*ceil(R)+1``."""
    half = int(math.ceil(support_radius))
    offsets = np.arange(-half, half + 1, dtype=float)
    y, x = np.meshgrid(offsets, offsets, indexing="ij")
    return x, y


def render_kernel(index, beta: float, support_radius: float | None = None) -> ShapeletKernel:
    """Sample a polar shapelet at pixel centres and normalise it.

    Parameters
    ----------
    index : ShapeletIndex or (n, m)
    beta : float
        Scale in pixels.
    support_radius : float, optional
        Truncation radius in pixels; samples with ``r > support_radius`` are
        zeroed.  Defaults to ``5 * beta`` and must be at least ``3 * beta``.

    Raises
    ------
    InvalidConfiguration
        For a nonpositive ``beta`` or a too-small support.
    """
    index = ShapeletIndex(*index).validate()
    if not np.isfinite(beta) or beta <= 0:
        raise InvalidConfiguration(f"beta must be positive, got {beta}")
    if support_radius is None:
        support_radius = DEFAULT_SUPPORT_FACTOR * beta
    if not support_radius >= MIN_SUPPORT_FACTOR * beta:
        raise InvalidConfiguration(
            f"support radius {support_radius} below minimum {MIN_SUPPORT_FACTOR} * beta = {MIN_SUPPORT_FACTOR * beta}"
        )

    x, y = kernel_grid(support_radius)
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    inside = r <= support_radius
    radial = chi_radial_unnorm(index, r / beta) / beta
    radial[~inside] = 0.0
    values = radial * np.exp(-1j * index.m * theta)
    if index.m == 0:
        values = values.real.astype(complex)
    else:
        # lattice truncation leaves a small mean for m = 4; the angular integral is zero
        values[inside] -= values[inside].mean()

    norm = np.sqrt(np.sum(np.abs(values) ** 2))
    if norm == 0:
        raise InvalidConfiguration(f"kernel {tuple(index)} at beta={beta} vanishes on the pixel grid")
    values = values / norm
    values.setflags(write=False)
    return ShapeletKernel(index=index, beta=float(beta), support_radius=float(support_radius), values=values)


def steer_kernel(kernel: ShapeletKernel, phi: float) -> np.ndarray:
    """Real part of the kernel rotated clockwise by ``phi`` radians.

    Built from two basis filters only: ``cos(m phi) Re[B] + sin(m phi) Im[B]``.
    """
    m = kernel.index.m
    return math.cos(m * phi) * kernel.values.real + math.sin(m * phi) * kernel.values.imag

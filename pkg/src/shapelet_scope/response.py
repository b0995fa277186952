"""Shapelet responses, rotation-optimised magnitudes and response distances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import InvalidConfiguration
from .scales import beta_for
from .shapelets import ShapeletIndex, ShapeletKernel, render_kernel

__all__ = [
    "BOUNDARY_MODES",
    "ComplexResponseField",
    "OrientedResponseField",
    "ResponseVectorField",
    "ReferenceSet",
    "DistanceField",
    "correlate",
    "correlate_many",
    "response_at",
    "optimal_orientation",
    "shapelet_responses",
    "response_vector_field",
    "response_distance_map",
    "DEGENERATE_RTOL",
    "FLAT_DISTANCE_ATOL",
]

BOUNDARY_MODES = ("periodic", "zero")

#: pixels whose magnitude vector norm is at most this times ||image||_2 count as degenerate
DEGENERATE_RTOL = 1e-10
#: distance maps whose raw range is at most this are treated as flat
FLAT_DISTANCE_ATOL = 1e-9


@dataclass(frozen=True)
class ComplexResponseField:
    index: ShapeletIndex
    beta: float
    values: np.ndarray


@dataclass(frozen=True)
class OrientedResponseField:
    """Rotation-optimised magnitude ``w*`` and orientation ``phi*`` per pixel.

    ``orientation`` lies in ``[0, 2 pi / m)``; it is zero where the response
    vanishes and for ``m = 0``.
    """

    index: ShapeletIndex
    beta: float
    magnitude: np.ndarray
    orientation: np.ndarray


@dataclass(frozen=True)
class ResponseVectorField:
    """Unit-normalised per-pixel vectors of rotation-optimised magnitudes.

    ``values`` has shape ``(H, W, p)``; degenerate pixels hold zero vectors.
    """

    shapelets: tuple
    betas: tuple
    values: np.ndarray
    degenerate: np.ndarray
    responses: tuple = field(default=(), repr=False, compare=False)

    @property
    def p(self) -> int:
        return self.values.shape[-1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[:2]


@dataclass(frozen=True)
class DistanceField:
    raw: np.ndarray
    normalized: np.ndarray


class ReferenceSet:
    """Pixel coordinates of a defect-free region, as ``(row, col)`` pairs.

    Reference vectors may be attached up front (``vectors``), e.g. taken from
    another image; otherwise they are read from the field being analysed.
    """

    def __init__(self, coords, vectors=None):
        coords = np.asarray(coords, dtype=int).reshape(-1, 2)
        if len(coords) == 0:
            raise InvalidConfiguration("reference set is empty")
        self.coords = coords
        self.vectors = None if vectors is None else np.asarray(vectors, dtype=float)

    def __len__(self) -> int:
        return len(self.coords)

    @classmethod
    def from_rect(cls, x: int, y: int, w: int, h: int, shape=None) -> "ReferenceSet":
        """Rectangle with top-left corner ``(x, y)`` (column, row) and size ``w`` x ``h``."""
        if w <= 0 or h <= 0:
            raise InvalidConfiguration(f"reference rectangle has nonpositive size {w}x{h}")
        rows, cols = np.mgrid[y : y + h, x : x + w]
        ref = cls(np.column_stack([rows.ravel(), cols.ravel()]))
        if shape is not None:
            ref.check_bounds(shape)
        return ref

    @classmethod
    def from_mask(cls, mask) -> "ReferenceSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(np.argwhere(mask))

    @classmethod
    def from_field(cls, field: ResponseVectorField, coords) -> "ReferenceSet":
        """Freeze the reference vectors of ``field`` at ``coords``."""
        ref = cls(coords)
        ref.check_bounds(field.shape)
        ref.vectors = field.values[ref.coords[:, 0], ref.coords[:, 1]]
        return ref

    def check_bounds(self, shape) -> None:
        h, w = shape
        r, c = self.coords[:, 0], self.coords[:, 1]
        if np.any((r < 0) | (r >= h) | (c < 0) | (c >= w)):
            raise InvalidConfiguration(f"reference coordinates fall outside the {h}x{w} image")

    def vectors_for(self, field: ResponseVectorField) -> np.ndarray:
        if self.vectors is not None:
            return self.vectors
        self.check_bounds(field.shape)
        return field.values[self.coords[:, 0], self.coords[:, 1]]


def _check_boundary(boundary: str) -> None:
    if boundary not in BOUNDARY_MODES:
        raise InvalidConfiguration(f"boundary must be one of {BOUNDARY_MODES}, got {boundary!r}")


def _wrapped_kernel(values: np.ndarray, shape) -> np.ndarray:
    # kernel offset (dy, dx) stored at ((dy) mod H, (dx) mod W)
    h = values.shape[0] // 2
    out = np.zeros(shape, dtype=complex)
    idx = np.arange(-h, h + 1)
    out[np.ix_(idx % shape[0], idx % shape[1])] = values
    return out


def correlate_many(image, kernels, boundary: str = "periodic") -> list[ComplexResponseField]:
    """Correlate one image with several kernels, sharing the image transform.

    ``w(x, y) = sum_{x', y'} f(x', y') B(x' - x, y' - y)`` evaluated through
    the DFT; ``boundary`` selects periodic wrap or zero padding.
    """
    _check_boundary(boundary)
    f = np.asarray(image, dtype=float)
    if f.ndim != 2:
        raise InvalidConfiguration(f"expected a 2-D image, got shape {f.shape}")
    H, W = f.shape
    kernels = list(kernels)
    for k in kernels:
        if k.values.shape[0] > H or k.values.shape[1] > W:
            raise InvalidConfiguration(
                f"kernel {k.values.shape} for shapelet {tuple(k.index)} at beta={k.beta:g} "
                f"is larger than the {H}x{W} image"
            )

    if boundary == "zero":
        pad = max(k.half_width for k in kernels) if kernels else 0
        work = np.zeros((H + 2 * pad, W + 2 * pad))
        work[:H, :W] = f
    else:
        work = f
    F = np.fft.fft2(work)

    out = []
    for k in kernels:
        Kc = np.fft.fft2(np.conj(_wrapped_kernel(k.values, work.shape)))
        w = np.fft.ifft2(F * np.conj(Kc))[:H, :W]
        out.append(ComplexResponseField(index=k.index, beta=k.beta, values=w))
    return out


def correlate(image, kernel: ShapeletKernel, boundary: str = "periodic") -> ComplexResponseField:
    """Complex response of ``image`` to ``kernel`` translated to every pixel."""
    return correlate_many(image, [kernel], boundary)[0]


def response_at(image, kernel: ShapeletKernel, row: int, col: int) -> complex:
    """Periodic-boundary response at a single pixel by direct summation.

    Unlike :func:`correlate`, the kernel may exceed the image; it is then
    folded onto the periodic extension of the image.
    """
    f = np.asarray(image, dtype=float)
    H, W = f.shape
    h = kernel.half_width
    idx = np.arange(-h, h + 1)
    patch = f[np.ix_((row + idx) % H, (col + idx) % W)]
    return complex(np.sum(patch * kernel.values))


def optimal_orientation(field: ComplexResponseField) -> OrientedResponseField:
    """Closed-form maximiser of the steered real response.

    The steered response ``cos(m phi) Re w + sin(m phi) Im w`` peaks at
    ``m phi = arg w`` with value ``|w|``; the representative in
    ``[0, 2 pi / m)`` is returned.
    """
    w = np.asarray(field.values)
    m = field.index.m
    magnitude = np.abs(w)
    if m == 0:
        return OrientedResponseField(field.index, field.beta, magnitude, np.zeros(w.shape))
    period = 2.0 * math.pi / m
    phi = np.mod(np.angle(w), 2.0 * math.pi) / m
    phi[(magnitude == 0) | (phi >= period)] = 0.0
    return OrientedResponseField(field.index, field.beta, magnitude, phi)


def shapelet_responses(image, shapelet_set, wavelength: float, boundary: str = "periodic"):
    """Oriented responses for each ``(index, C)`` at ``beta = C * lambda / 2 pi``."""
    if not shapelet_set:
        raise InvalidConfiguration("shapelet set is empty")
    if not wavelength > 0:
        raise InvalidConfiguration(f"wavelength must be positive, got {wavelength}")
    kernels = [render_kernel(idx, beta_for(c, wavelength)) for idx, c in shapelet_set]
    return [optimal_orientation(cf) for cf in correlate_many(image, kernels, boundary)]


def response_vector_field(image, shapelet_set, wavelength: float, boundary: str = "periodic") -> ResponseVectorField:
    """Stack rotation-optimised magnitudes per pixel and normalise to unit length."""
    responses = shapelet_responses(image, shapelet_set, wavelength, boundary)
    mags = np.stack([r.magnitude for r in responses], axis=-1)
    norms = np.sqrt(np.sum(mags**2, axis=-1))
    scale = np.sqrt(np.sum(np.asarray(image, dtype=float) ** 2))
    degenerate = norms <= DEGENERATE_RTOL * scale
    safe = np.where(degenerate, 1.0, norms)
    values = np.where(degenerate[..., None], 0.0, mags / safe[..., None])
    return ResponseVectorField(
        shapelets=tuple(r.index for r in responses),
        betas=tuple(r.beta for r in responses),
        values=values,
        degenerate=degenerate,
        responses=tuple(responses),
    )


def response_distance_map(field: ResponseVectorField, ref: ReferenceSet) -> DistanceField:
    """Distance from every pixel's response vector to the nearest reference vector."""
    if ref is None or len(ref) == 0:
        raise InvalidConfiguration("reference set is empty")
    refs = np.unique(ref.vectors_for(field), axis=0)
    if refs.shape[1] != field.p:
        raise InvalidConfiguration(f"reference vectors have dimension {refs.shape[1]}, field has {field.p}")
    tree = cKDTree(refs)
    flat = field.values.reshape(-1, field.p)
    raw, _ = tree.query(flat, k=1)
    raw = raw.reshape(field.shape)

    lo, hi = float(raw.min()), float(raw.max())
    if hi - lo > FLAT_DISTANCE_ATOL:
        normalized = (raw - lo) / (hi - lo)
    else:
        normalized = np.zeros_like(raw)
    return DistanceField(raw=raw, normalized=normalized)

"""One-mode stripe/hexagonal prototype patterns and synthetic multi-grain fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .exceptions import InvalidConfiguration

__all__ = [
    "PatternSpec",
    "GrainFieldSpec",
    "basis_vectors",
    "pattern_values",
    "uniform_pattern",
    "multi_grain_pattern",
    "two_grain_spec",
    "voronoi_grain_spec",
    "MIN_WAVELENGTH",
]

MIN_WAVELENGTH = 4.0
KINDS = ("stripe", "hexagonal")

_SQ3 = math.sqrt(3.0) / 2.0
# unit basis directions (e1, e2 components); the stripe uses only the first
_DIRECTIONS = np.array([[0.0, 1.0], [_SQ3, -0.5], [-_SQ3, -0.5]])


@dataclass(frozen=True)
class PatternSpec:
    """Parameters of a uniform one-mode pattern.

    ``orientation`` (radians) rotates the pattern about ``origin`` in the same
    sense as a steered filter: the rotated pattern at position ``x`` equals
    the unrotated one at ``R(orientation) x`` with
    ``R(a) = [[cos a, -sin a], [sin a, cos a]]`` acting on ``(x, y)``, ``y``
    being the row index.  ``origin`` is the pixel where every
    cosine is at its maximum; ``None`` means the central pixel
    ``(width // 2, height // 2)``.
    """

    kind: str
    wavelength: float
    orientation: float = 0.0
    amplitude: float = 1.0
    offset: float = 0.0
    width: int = 256
    height: int = 256
    origin: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfiguration(f"pattern kind must be one of {KINDS}, got {self.kind!r}")
        if not self.wavelength >= MIN_WAVELENGTH:
            raise InvalidConfiguration(f"wavelength must be >= {MIN_WAVELENGTH} px, got {self.wavelength}")
        if self.amplitude == 0 or not np.isfinite(self.amplitude):
            raise InvalidConfiguration("amplitude must be finite and nonzero")
        if int(self.width) < 1 or int(self.height) < 1:
            raise InvalidConfiguration("width and height must be positive")

    @property
    def center(self) -> tuple[float, float]:
        if self.origin is None:
            return (self.width // 2, self.height // 2)
        return tuple(self.origin)

    @classmethod
    def from_dict(cls, d: dict) -> "PatternSpec":
        d = dict(d)
        if "lambda" in d:
            d["wavelength"] = d.pop("lambda")
        if d.get("origin") is not None:
            d["origin"] = tuple(d["origin"])
        return cls(**d)


def _unit_directions(spec: PatternSpec) -> np.ndarray:
    c, s = math.cos(spec.orientation), math.sin(spec.orientation)
    rot = np.array([[c, -s], [s, c]])
    dirs = _DIRECTIONS[:1] if spec.kind == "stripe" else _DIRECTIONS
    # k . (R x) == (R^T k) . x
    return dirs @ rot


def basis_vectors(spec: PatternSpec) -> np.ndarray:
    """Wave vectors ``k_n`` (rows, ``(kx, ky)``) in radians per pixel."""
    return (2.0 * math.pi / spec.wavelength) * _unit_directions(spec)


def pattern_values(spec: PatternSpec, x, y):
    """Evaluate the pattern analytically at (possibly fractional) pixel positions.

    Positions are reduced modulo the wavelength before the cosine, so commensurate patterns
    repeat bit-for-bit from one period to the next.
    """
    x0, y0 = spec.center
    dx = np.asarray(x, dtype=float) - x0
    dy = np.asarray(y, dtype=float) - y0
    total = np.zeros(np.broadcast(dx, dy).shape)
    for ux, uy in _unit_directions(spec):
        along = ux * dx + uy * dy
        # exact for integer offsets and wavelengths
        along = along - spec.wavelength * np.rint(along / spec.wavelength)
        total += np.cos(2.0 * math.pi * along / spec.wavelength)
    return spec.offset + spec.amplitude * total


def uniform_pattern(spec: PatternSpec) -> np.ndarray:
    """Render a uniform stripe or hexagonal pattern as a ``(height, width)`` image."""
    y, x = np.mgrid[0 : spec.height, 0 : spec.width]
    return pattern_values(spec, x, y)


@dataclass
class GrainFieldSpec:
    """A partition of the image into grains, each with its own pattern.

    ``band_width`` is the full width (pixels) of the blended boundary band;
    ``None`` means half the shared wavelength.
    """

    regions: list = field(default_factory=list)
    band_width: float | None = None

    def validate(self) -> tuple[int, int]:
        if not self.regions:
            raise InvalidConfiguration("grain field needs at least one region")
        specs = [s for _, s in self.regions]
        first = specs[0]
        for s in specs[1:]:
            if s.kind != first.kind or s.wavelength != first.wavelength:
                raise InvalidConfiguration("all grains must share pattern kind and wavelength")
            if (s.width, s.height) != (first.width, first.height):
                raise InvalidConfiguration("all grains must share image dimensions")
        shape = (first.height, first.width)
        cover = np.zeros(shape, dtype=int)
        for mask, _ in self.regions:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != shape:
                raise InvalidConfiguration(f"region mask shape {mask.shape} does not match image {shape}")
            cover += mask
        if np.any(cover > 1):
            raise InvalidConfiguration("region masks overlap")
        if np.any(cover == 0):
            raise InvalidConfiguration("region masks do not cover the image")
        if self.band_width is not None and not self.band_width > 0:
            raise InvalidConfiguration("band_width must be positive")
        return shape

    @property
    def resolved_band_width(self) -> float:
        if self.band_width is not None:
            return float(self.band_width)
        return self.regions[0][1].wavelength / 2.0


def _signed_distance(mask: np.ndarray) -> np.ndarray:
    # distance to the pixel-edge interface: positive inside, negative outside
    inside = ndimage.distance_transform_edt(mask) - 0.5
    outside = ndimage.distance_transform_edt(~mask) - 0.5
    return np.where(mask, inside, -outside)


def multi_grain_pattern(spec: GrainFieldSpec):
    """Render a multi-grain field and its ground-truth boundary band.

    Inside the band (pixels closer than ``band_width / 2`` to another grain)
    neighbouring grain patterns are blended with weights that ramp linearly
    across the band; outside it every pixel equals its grain's uniform
    pattern exactly.

    Returns
    -------
    image : numpy.ndarray
    boundary_mask : numpy.ndarray of bool
    """
    shape = spec.validate()
    if len(spec.regions) == 1:
        return uniform_pattern(spec.regions[0][1]), np.zeros(shape, dtype=bool)

    band = spec.resolved_band_width
    weights = []
    boundary = np.zeros(shape, dtype=bool)
    for mask, _ in spec.regions:
        mask = np.asarray(mask, dtype=bool)
        d = _signed_distance(mask)
        weights.append(np.clip(0.5 + d / band, 0.0, 1.0))
        boundary |= mask & (d < band / 2.0)
    weights = np.array(weights)
    weights /= weights.sum(axis=0)

    image = np.zeros(shape)
    for w, (_, pspec) in zip(weights, spec.regions):
        image += w * uniform_pattern(pspec)
    return image, boundary


def two_grain_spec(
    kind: str,
    wavelength: float,
    orientations=(0.0, math.pi / 2),
    width: int = 256,
    height: int = 256,
    band_width: float | None = None,
    split: int | None = None,
    **pattern_kw,
) -> GrainFieldSpec:
    """Left/right half-plane grains split at column ``split`` (default centre)."""
    split = width // 2 if split is None else split
    left = np.zeros((height, width), dtype=bool)
    left[:, :split] = True
    base = PatternSpec(kind=kind, wavelength=wavelength, width=width, height=height, **pattern_kw)
    return GrainFieldSpec(
        regions=[
            (left, replace(base, orientation=orientations[0])),
            (~left, replace(base, orientation=orientations[1])),
        ],
        band_width=band_width,
    )


def voronoi_grain_spec(
    kind: str,
    wavelength: float,
    n_grains: int,
    width: int = 256,
    height: int = 256,
    seed: int = 0,
    band_width: float | None = None,
    **pattern_kw,
) -> GrainFieldSpec:
    """Voronoi polycrystal with random grain orientations and origins."""
    if n_grains < 1:
        raise InvalidConfiguration("n_grains must be >= 1")
    rng = np.random.default_rng(seed)
    seeds = rng.uniform([0, 0], [width, height], size=(n_grains, 2))
    y, x = np.mgrid[0:height, 0:width]
    d2 = (x[None] - seeds[:, 0, None, None]) ** 2 + (y[None] - seeds[:, 1, None, None]) ** 2
    owner = np.argmin(d2, axis=0)
    # hexagonal patterns repeat every pi/3, stripes every pi
    period = math.pi / 3 if kind == "hexagonal" else math.pi
    regions = []
    for i in range(n_grains):
        mask = owner == i
        if not mask.any():
            continue
        spec = PatternSpec(
            kind=kind,
            wavelength=wavelength,
            orientation=float(rng.uniform(0, period)),
            origin=(float(seeds[i, 0]), float(seeds[i, 1])),
            width=width,
            height=height,
            **pattern_kw,
        )
        regions.append((mask, spec))
    return GrainFieldSpec(regions=regions, band_width=band_width)

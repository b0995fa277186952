"""Spectral density, radial averaging and dominant wavelength detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidConfiguration, NoDominantPeak

__all__ = [
    "RadialProfile",
    "DEFAULT_K_MIN",
    "DEFAULT_PROMINENCE",
    "spectral_density",
    "radial_average",
    "dominant_wavelength",
    "pad_to_square",
    "estimate_wavelength",
]

DEFAULT_K_MIN = 2
DEFAULT_PROMINENCE = 10.0


@dataclass(frozen=True)
class RadialProfile:
    """Mean spectral power per integer-radius annulus.

    ``counts`` holds the number of density bins in each annulus so that
    ``sum(power * counts)`` recovers the total power.
    """

    wavenumber: np.ndarray
    power: np.ndarray
    counts: np.ndarray

    def __len__(self) -> int:
        return len(self.wavenumber)


def spectral_density(image) -> np.ndarray:
    """Centred squared magnitude of the unnormalised 2-D DFT.

    The zero-frequency bin sits at index ``(H // 2, W // 2)``.
    """
    f = np.asarray(image, dtype=float)
    if f.ndim != 2:
        raise InvalidConfiguration(f"expected a 2-D image, got shape {f.shape}")
    F = np.fft.fftshift(np.fft.fft2(f))
    return F.real**2 + F.imag**2


def _radius_index(shape) -> np.ndarray:
    h, w = shape
    v = np.arange(h) - h // 2
    u = np.arange(w) - w // 2
    return np.rint(np.hypot(v[:, None], u[None, :])).astype(int)


def radial_average(sd) -> RadialProfile:
    """Average a centred spectral density over rounded-radius annuli.

    Empty annuli are dropped, so ``wavenumber`` is strictly increasing but
    not necessarily contiguous.
    """
    sd = np.asarray(sd, dtype=float)
    rad = _radius_index(sd.shape).ravel()
    counts = np.bincount(rad)
    sums = np.bincount(rad, weights=sd.ravel())
    keep = counts > 0
    k = np.nonzero(keep)[0]
    return RadialProfile(
        wavenumber=k.astype(float),
        power=sums[keep] / counts[keep],
        counts=counts[keep],
    )


def dominant_wavelength(
    profile: RadialProfile,
    image_side: int,
    k_min: int = DEFAULT_K_MIN,
    prominence: float = DEFAULT_PROMINENCE,
) -> float:
    """Wavelength in pixels of the strongest annulus beyond ``k_min``.

    Raises
    ------
    NoDominantPeak
        If the peak power does not exceed ``prominence`` times the profile
        median.
    """
    k = np.asarray(profile.wavenumber)
    p = np.asarray(profile.power)
    sel = k >= k_min
    if not np.any(sel):
        raise NoDominantPeak(f"no radial bins at or above k_min={k_min}")
    ks, ps = k[sel], p[sel]
    i = int(np.argmax(ps))
    median = float(np.median(ps))
    if not ps[i] > prominence * median:
        ratio = ps[i] / median if median > 0 else float("inf")
        raise NoDominantPeak(
            f"strongest annulus k={ks[i]:g} has {ratio:.3g}x the median power; "
            f"need more than {prominence:g}x"
        )
    return float(image_side / ks[i])


def pad_to_square(image) -> np.ndarray:
    """Zero-pad a 2-D array on the bottom/right to a ``max(H, W)`` square."""
    f = np.asarray(image, dtype=float)
    h, w = f.shape
    side = max(h, w)
    if h == w:
        return f
    out = np.zeros((side, side))
    out[:h, :w] = f
    return out


def estimate_wavelength(image, k_min: int = DEFAULT_K_MIN, prominence: float = DEFAULT_PROMINENCE) -> float:
    """Dominant pattern wavelength of an image at bin resolution.

    The mean is removed before padding and transforming.
    """
    f = np.asarray(image, dtype=float)
    sq = pad_to_square(f - f.mean())
    profile = radial_average(spectral_density(sq))
    return dominant_wavelength(profile, sq.shape[0], k_min=k_min, prominence=prominence)

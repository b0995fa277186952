"""Scale calibration: find the response-maximising ``C`` for each shapelet.

For each wavelength a zero-offset prototype (stripe for ``m <= 2``,
hexagonal otherwise) is rendered, the probe pixel with the strongest
rotation-optimised response inside one pattern period is located, and the
response at that pixel is maximised over ``beta`` by a coarse grid followed
by golden-section refinement.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .exceptions import CalibrationError, InvalidConfiguration
from .patterns import PatternSpec, uniform_pattern
from .response import correlate, optimal_orientation, response_at
from .scales import REFERENCE_COEFFICIENTS, reduced_wavelength
from .shapelets import ShapeletIndex, render_kernel

log = logging.getLogger(__name__)

__all__ = [
    "ScaleCurve",
    "ScaleCoefficient",
    "prototype_kind",
    "locate_probe",
    "scale_response_curve",
    "refine_maximum",
    "calibrate_scale",
    "DEFAULT_WAVELENGTHS",
    "GRID_RANGE",
    "GRID_STEP",
    "REFINE_TOL",
    "DEVIATION_FLAG",
]

DEFAULT_WAVELENGTHS = (16.0, 32.0, 48.0)
#: coarse search range and step, in units of the reduced wavelength
GRID_RANGE = (0.5, 4.0)
GRID_STEP = 0.02
REFINE_TOL = 1e-3
DEVIATION_FLAG = 0.05
#: half-size of the probe search window, in wavelengths; covers a full unit cell
PROBE_WINDOW = 0.7


@dataclass(frozen=True)
class ScaleCurve:
    shapelet: ShapeletIndex
    wavelength: float
    beta: np.ndarray
    response: np.ndarray
    probe: tuple[int, int]

    @property
    def coefficient(self) -> np.ndarray:
        """Scale axis expressed as ``beta / (lambda / 2 pi)``."""
        return self.beta / reduced_wavelength(self.wavelength)


@dataclass(frozen=True)
class ScaleCoefficient:
    shapelet: ShapeletIndex
    C: float
    per_wavelength: dict = field(default_factory=dict)
    curves: tuple = field(default=(), repr=False, compare=False)

    @property
    def reference(self) -> float | None:
        return REFERENCE_COEFFICIENTS.get(self.shapelet)

    @property
    def deviation(self) -> float | None:
        ref = self.reference
        return None if ref is None else self.C - ref

    @property
    def flagged(self) -> bool:
        dev = self.deviation
        return dev is not None and abs(dev) > DEVIATION_FLAG


def prototype_kind(index: ShapeletIndex) -> str:
    return "stripe" if index.m <= 2 else "hexagonal"


def locate_probe(pattern, index: ShapeletIndex, beta: float, center, window: float) -> tuple[int, int]:
    """Pixel of maximal ``w*`` within ``window`` pixels of ``center``.

    Ties are broken towards the pixel nearest ``center``.
    """
    pattern = np.asarray(pattern, dtype=float)
    mag = optimal_orientation(correlate(pattern, render_kernel(index, beta))).magnitude
    cx, cy = center
    half = int(np.ceil(window))
    rows = np.arange(int(cy) - half, int(cy) + half + 1)
    cols = np.arange(int(cx) - half, int(cx) + half + 1)
    sub = mag[np.ix_(rows % mag.shape[0], cols % mag.shape[1])]
    best = sub.max()
    cand = np.argwhere(sub >= best * (1 - 1e-9))
    d2 = (rows[cand[:, 0]] - cy) ** 2 + (cols[cand[:, 1]] - cx) ** 2
    r, c = cand[int(np.argmin(d2))]
    return int(rows[r] % mag.shape[0]), int(cols[c] % mag.shape[1])


def _response(pattern, index, beta, probe) -> float:
    return abs(response_at(pattern, render_kernel(index, beta), *probe))


def scale_response_curve(pattern, index, wavelength: float, beta_range, probe=None) -> ScaleCurve:
    """Rotation-optimised response at a fixed probe pixel as a function of beta.

    Parameters
    ----------
    pattern : 2-D array
        A uniform prototype image.
    index : ShapeletIndex
    wavelength : float
        Pattern wavelength in pixels.
    beta_range : (lo, hi, step)
        Scales in pixels; ``hi`` is included when it falls on the grid.
    probe : (row, col), optional
        Defaults to the strongest-response pixel within one period of the
        image centre, located at the middle of the beta range.
    """
    index = ShapeletIndex(*index).validate()
    lo, hi, step = (float(v) for v in beta_range)
    if not (0 < lo < hi) or not step > 0:
        raise InvalidConfiguration(f"degenerate beta range {beta_range}")
    pattern = np.asarray(pattern, dtype=float)
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    betas = lo + step * np.arange(n)
    if probe is None:
        h, w = pattern.shape
        probe = locate_probe(pattern, index, 0.5 * (lo + hi), (w // 2, h // 2), PROBE_WINDOW * wavelength)
    responses = np.array([_response(pattern, index, b, probe) for b in betas])
    return ScaleCurve(shapelet=index, wavelength=float(wavelength), beta=betas, response=responses, probe=probe)


def refine_maximum(curve: ScaleCurve, pattern, tol: float) -> float:
    """Golden-section refinement of the coarse maximum to absolute ``tol`` (pixels).

    Raises
    ------
    CalibrationError
        If the coarse maximum sits on an end of the grid.
    """
    i = int(np.argmax(curve.response))
    if i == 0 or i == len(curve.beta) - 1:
        raise CalibrationError(
            f"response maximum for shapelet {tuple(curve.shapelet)} at lambda={curve.wavelength:g} "
            f"lies on the edge of the searched range (beta={curve.beta[i]:g})"
        )
    a, b, c = curve.beta[i - 1 : i + 2]

    def neg(beta):
        return -_response(pattern, curve.shapelet, beta, curve.probe)

    res = optimize.minimize_scalar(neg, bracket=(a, b, c), method="golden", tol=tol / (2.0 * b))
    beta = float(res.x)
    if not a < beta < c:
        raise CalibrationError(f"refined maximum {beta:g} escaped the bracket ({a:g}, {c:g})")
    return beta


def calibrate_scale(
    index,
    wavelengths=DEFAULT_WAVELENGTHS,
    size: int = 256,
    grid_range=GRID_RANGE,
    grid_step: float = GRID_STEP,
    tol: float = REFINE_TOL,
) -> ScaleCoefficient:
    """Response-maximising scale coefficient averaged over ``wavelengths``.

    Grid bounds, step and tolerance are in units of the reduced wavelength
    ``lambda / 2 pi`` of each prototype.
    """
    index = ShapeletIndex(*index).validate()
    if index.n != 0 or not 1 <= index.m <= 6:
        raise InvalidConfiguration(f"calibration supports n=0, 1<=m<=6; got {tuple(index)}")
    if not wavelengths:
        raise InvalidConfiguration("no wavelengths to calibrate over")

    per = {}
    curves = []
    for lam in wavelengths:
        lam = float(lam)
        unit = reduced_wavelength(lam)
        spec = PatternSpec(kind=prototype_kind(index), wavelength=lam, width=size, height=size)
        pattern = uniform_pattern(spec)
        curve = scale_response_curve(
            pattern, index, lam, (grid_range[0] * unit, grid_range[1] * unit, grid_step * unit)
        )
        beta = refine_maximum(curve, pattern, tol * unit)
        per[lam] = beta / unit
        curves.append(curve)
        log.debug("shapelet %s lambda=%g probe=%s C=%.4f", tuple(index), lam, curve.probe, per[lam])

    C = float(np.mean(list(per.values())))
    coeff = ScaleCoefficient(shapelet=index, C=C, per_wavelength=per, curves=tuple(curves))
    if coeff.flagged:
        log.warning("calibrated C=%.4f for %s deviates from reference %.3f", C, tuple(index), coeff.reference)
    return coeff

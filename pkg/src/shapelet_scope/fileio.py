"""Image, CSV and JSON input/output.

Images are read as grayscale PGM (P2/P5) or PNG and scaled to ``[0, 1]`` by
the format's maximum value.  Fields are written either as 16-bit grayscale
images (min-max normalised) or as CSV rows ``x,y,value`` with full
round-trip precision.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .exceptions import ImageFormatError, InvalidConfiguration
from .shapelets import ShapeletIndex

__all__ = [
    "ImageReadError",
    "load_image",
    "load_mask",
    "to_uint16",
    "save_image16",
    "save_mask",
    "save_field",
    "load_field_csv",
    "write_csv",
    "write_json",
    "read_calibration_csv",
    "CALIBRATION_HEADER",
]

SUPPORTED_FORMATS = {"PPM": "PGM", "PNG": "PNG"}
_MODE_MAX = {"L": 255.0, "I;16": 65535.0, "I;16B": 65535.0, "I;16L": 65535.0, "I": 65535.0}

CALIBRATION_HEADER = ["m", "n", "C", "λ_set", "deviation_from_paper"]


class ImageReadError(ImageFormatError):
    """The file is missing or cannot be decoded as an image."""


def load_image(path) -> np.ndarray:
    """Read a grayscale PGM or PNG as a float array in ``[0, 1]``.

    Raises
    ------
    ImageReadError
        Missing or undecodable file.
    ImageFormatError
        Decodable image in an unsupported container or colour mode.
    """
    path = Path(path)
    try:
        im = Image.open(path)
        im.load()
    except FileNotFoundError as exc:
        raise ImageReadError(f"cannot read {path}: file not found") from exc
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageReadError(f"cannot read {path}: not a decodable image ({exc})") from exc

    if im.format not in SUPPORTED_FORMATS:
        raise ImageFormatError(f"{path}: unsupported image format {im.format!r}; expected PGM or PNG")
    if im.format == "PPM" and im.mode not in _MODE_MAX:
        raise ImageFormatError(f"{path}: unsupported PNM colour mode {im.mode!r}; expected grayscale PGM")
    if im.mode not in _MODE_MAX:
        raise ImageFormatError(f"{path}: unsupported colour mode {im.mode!r}; expected 8- or 16-bit grayscale")
    return np.asarray(im, dtype=float) / _MODE_MAX[im.mode]


def load_mask(path) -> np.ndarray:
    """Binary mask from a grayscale image: pixels above half scale are set."""
    return load_image(path) > 0.5


def to_uint16(field, lo=None, hi=None) -> np.ndarray:
    """Map ``[lo, hi]`` (default min/max of ``field``) linearly onto ``[0, 65535]``.

    A constant field maps to all zeros.
    """
    a = np.asarray(field, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidConfiguration("field contains non-finite values")
    lo = float(a.min()) if lo is None else lo
    hi = float(a.max()) if hi is None else hi
    if not hi > lo:
        return np.zeros(a.shape, dtype=np.uint16)
    scaled = np.clip((a - lo) / (hi - lo), 0.0, 1.0)
    return np.rint(scaled * 65535.0).astype(np.uint16)


def save_image16(values: np.ndarray, path) -> None:
    """Write a uint16 array as 16-bit grayscale PNG or PGM, chosen by suffix."""
    path = Path(path)
    fmt = {".png": "PNG", ".pgm": "PPM"}.get(path.suffix.lower())
    if fmt is None:
        raise InvalidConfiguration(f"unsupported output image suffix {path.suffix!r}; use .png or .pgm")
    Image.fromarray(np.asarray(values, dtype=np.uint16)).save(path, format=fmt)


def save_mask(mask, path) -> None:
    path = Path(path)
    fmt = {".png": "PNG", ".pgm": "PPM"}.get(path.suffix.lower())
    if fmt is None:
        raise InvalidConfiguration(f"unsupported output image suffix {path.suffix!r}; use .png or .pgm")
    Image.fromarray(np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)).save(path, format=fmt)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _field_rows(a: np.ndarray):
    h, w = a.shape[:2]
    flat = a.reshape(h * w, -1)
    for i, vals in enumerate(flat.tolist()):
        y, x = divmod(i, w)
        yield [x, y, *(repr(float(v)) for v in vals)]


def save_field(field, path, mode: str = "raw_csv") -> None:
    """Write a scalar ``(H, W)`` or vector ``(H, W, p)`` field.

    ``normalized_image`` writes a 16-bit image with min -> 0 and
    max -> 65535 (scalar fields only); ``raw_csv`` writes row-major
    ``x,y,value`` (or ``x,y,v1..vp``) rows under a header.
    """
    a = np.asarray(field, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidConfiguration("field contains non-finite values")
    try:
        if mode == "normalized_image":
            if a.ndim != 2:
                raise InvalidConfiguration("only scalar fields can be written as images")
            save_image16(to_uint16(a), path)
        elif mode == "raw_csv":
            if a.ndim == 2:
                header = ["x", "y", "value"]
            elif a.ndim == 3:
                header = ["x", "y", *(f"v{k + 1}" for k in range(a.shape[2]))]
            else:
                raise InvalidConfiguration(f"cannot write field of shape {a.shape}")
            write_csv(path, header, _field_rows(a))
        else:
            raise InvalidConfiguration(f"unknown field output mode {mode!r}")
    except OSError as exc:
        raise InvalidConfiguration(f"cannot write {path}: {exc.strerror or exc}") from exc


def load_field_csv(path) -> np.ndarray:
    """Inverse of ``save_field(..., mode="raw_csv")``."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    xs = np.array([int(r[0]) for r in body])
    ys = np.array([int(r[1]) for r in body])
    vals = np.array([[float(v) for v in r[2:]] for r in body])
    out = np.zeros((ys.max() + 1, xs.max() + 1, vals.shape[1]))
    out[ys, xs] = vals
    return out[..., 0] if len(header) == 3 else out


def write_json(path, payload) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def read_calibration_csv(path) -> dict:
    """Scale coefficients ``{ShapeletIndex(n, m): C}`` from a ``calibrate`` CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"m", "n", "C"} <= set(reader.fieldnames):
            raise InvalidConfiguration(f"{path}: not a calibration CSV (need columns m, n, C)")
        return {ShapeletIndex(int(r["n"]), int(r["m"])): float(r["C"]) for r in reader}

"""``shapelet-scope`` command line interface.

Subcommands
-----------
generate   render a prototype or multi-grain pattern (and its boundary band)
spectrum   spectral density, radial profile and dominant wavelength of an image
calibrate  response-maximising scale coefficients for the n=0, m=1..6 shapelets
analyze    response vectors and response-distance defect map of an image
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import DEFAULT_WAVELENGTHS, DEVIATION_FLAG, calibrate_scale
from .exceptions import InvalidConfiguration, NoDominantPeak, ShapeletScopeError
from .fileio import (
    CALIBRATION_HEADER,
    load_image,
    load_mask,
    read_calibration_csv,
    save_field,
    save_image16,
    save_mask,
    to_uint16,
    write_csv,
    write_json,
)
from .patterns import GrainFieldSpec, PatternSpec, multi_grain_pattern, two_grain_spec, uniform_pattern, voronoi_grain_spec
from .response import BOUNDARY_MODES, ReferenceSet, response_distance_map, response_vector_field
from .scales import DEFAULT_ORDERS, REFERENCE_COEFFICIENTS
from .shapelets import ShapeletIndex
from .spectral import (
    DEFAULT_K_MIN,
    DEFAULT_PROMINENCE,
    dominant_wavelength,
    pad_to_square,
    radial_average,
    spectral_density,
)

log = logging.getLogger("shapelet_scope")

SUBCOMMANDS = ("generate", "spectrum", "calibrate", "analyze")
MIN_ANALYSIS_SIDE = 16


@dataclass
class AnalysisConfig:
    """Fully resolved run configuration; echoed into every JSON summary."""

    input: str | None = None
    out: str = "."
    wavelength: float | None = None
    orders: list = field(default_factory=lambda: list(DEFAULT_ORDERS))
    coefficients: str = "builtin"
    boundary: str = "periodic"
    ref_rect: list | None = None
    ref_mask: str | None = None
    prominence: float = DEFAULT_PROMINENCE
    k_min: int = DEFAULT_K_MIN
    image_format: str = "png"
    figures: bool = True
    # generate
    pattern: dict | None = None
    # calibrate
    lambdas: list = field(default_factory=lambda: list(DEFAULT_WAVELENGTHS))
    size: int = 256
    curves: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisConfig":
        d = dict(d)
        if "lambda" in d:
            d["wavelength"] = d.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidConfiguration(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**d)

    def validate(self) -> "AnalysisConfig":
        if self.boundary not in BOUNDARY_MODES:
            raise InvalidConfiguration(f"boundary must be one of {BOUNDARY_MODES}")
        if self.wavelength is not None and not self.wavelength > 0:
            raise InvalidConfiguration("lambda override must be positive")
        if self.ref_rect is not None and self.ref_mask is not None:
            raise InvalidConfiguration("give either ref_rect or ref_mask, not both")
        if self.ref_rect is not None and len(self.ref_rect) != 4:
            raise InvalidConfiguration("ref_rect must be x,y,w,h")
        if not self.orders or any(int(m) != m or not 1 <= m <= 6 for m in self.orders):
            raise InvalidConfiguration("orders must be integers in 1..6")
        if self.image_format not in ("png", "pgm"):
            raise InvalidConfiguration("image_format must be png or pgm")
        if not self.prominence > 0:
            raise InvalidConfiguration("prominence must be positive")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("wavelength")
        return d


def _image_path(out: Path, stem: str, cfg: AnalysisConfig) -> Path:
    return out / f"{stem}.{cfg.image_format}"


# -- generate ---------------------------------------------------------------


def _grain_spec_from_dict(d: dict, cfg: AnalysisConfig):
    d = dict(d)
    layout = d.pop("layout", "regions" if "regions" in d else "uniform")
    band = d.pop("band_width", None)
    if cfg.wavelength is not None:
        d["wavelength"] = cfg.wavelength
        d.pop("lambda", None)
    if layout == "uniform":
        return PatternSpec.from_dict(d)
    if layout == "halves":
        orientations = d.pop("orientations", [0.0, math.pi / 2])
        base = PatternSpec.from_dict(d)
        return two_grain_spec(
            base.kind, base.wavelength, orientations, width=base.width, height=base.height,
            band_width=band, amplitude=base.amplitude, offset=base.offset,
        )
    if layout == "voronoi":
        n_grains = int(d.pop("n_grains", 4))
        seed = int(d.pop("seed", 0))
        base = PatternSpec.from_dict(d)
        return voronoi_grain_spec(
            base.kind, base.wavelength, n_grains, width=base.width, height=base.height, seed=seed,
            band_width=band, amplitude=base.amplitude, offset=base.offset,
        )
    if layout == "regions":
        region_list = d.pop("regions")
        regions = []
        for r in region_list:
            r = dict(r)
            rect, mask_path = r.pop("rect", None), r.pop("mask", None)
            pspec = PatternSpec.from_dict({**d, **r})
            if rect is not None:
                x, y, w, h = (int(v) for v in rect)
                mask = np.zeros((pspec.height, pspec.width), dtype=bool)
                mask[y : y + h, x : x + w] = True
            elif mask_path is not None:
                mask = load_mask(mask_path)
            else:
                raise InvalidConfiguration("each region needs a rect or a mask")
            regions.append((mask, pspec))
        return GrainFieldSpec(regions=regions, band_width=band)
    raise InvalidConfiguration(f"unknown layout {layout!r}")


def run_generate(cfg: AnalysisConfig) -> int:
    if not cfg.pattern:
        raise InvalidConfiguration("generate needs a 'pattern' object in the config")
    spec = _grain_spec_from_dict(cfg.pattern, cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(spec, PatternSpec):
        image, mask = uniform_pattern(spec), np.zeros((spec.height, spec.width), dtype=bool)
        wavelength = spec.wavelength
    else:
        image, mask = multi_grain_pattern(spec)
        wavelength = spec.regions[0][1].wavelength
    save_image16(to_uint16(image), _image_path(out, "pattern", cfg))
    save_mask(mask, _image_path(out, "boundary_mask", cfg))
    save_field(image, out / "pattern_raw.csv", "raw_csv")
    write_json(
        out / "generate.json",
        {
            "lambda_px": wavelength,
            "width": image.shape[1],
            "height": image.shape[0],
            "boundary_pixel_count": int(mask.sum()),
            "value_range": [float(image.min()), float(image.max())],
            "config": cfg.to_dict(),
        },
    )
    if cfg.figures:
        from .plotting import pattern_figure

        pattern_figure(image, mask, out / "pattern_figure.png")
    log.info("wrote pattern (%dx%d, lambda=%g) to %s", image.shape[1], image.shape[0], wavelength, out)
    return 0


# -- spectrum ---------------------------------------------------------------


def _require_input(cfg: AnalysisConfig) -> np.ndarray:
    if not cfg.input:
        raise InvalidConfiguration("an input image is required")
    return load_image(cfg.input)


def run_spectrum(cfg: AnalysisConfig) -> int:
    image = _require_input(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)

    sd = spectral_density(image)
    save_image16(to_uint16(np.log10(1.0 + sd)), _image_path(out, "spectrum", cfg))
    profile = radial_average(sd)
    write_csv(
        out / "radial_profile.csv",
        ["wavenumber", "power"],
        ([repr(float(k)), repr(float(p))] for k, p in zip(profile.wavenumber, profile.power)),
    )

    sq = pad_to_square(image - image.mean())
    detect = radial_average(spectral_density(sq))
    try:
        lam = dominant_wavelength(detect, sq.shape[0], k_min=cfg.k_min, prominence=cfg.prominence)
        note = None
    except NoDominantPeak as exc:
        lam, note = None, str(exc)
    write_json(out / "spectrum.json", {"lambda_px": lam, "no_peak_reason": note, "config": cfg.to_dict()})
    if cfg.figures:
        from .plotting import spectrum_figure

        spectrum_figure(spectral_density(sq), detect, out / "spectrum_figure.png", lam, sq.shape[0])
    log.info("dominant wavelength: %s", "none" if lam is None else f"{lam:g} px")
    return 0


# -- calibrate --------------------------------------------------------------


def run_calibrate(cfg: AnalysisConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    lambdas = [float(v) for v in (cfg.lambdas if cfg.wavelength is None else [cfg.wavelength])]
    results = []
    rows = []
    for m in cfg.orders:
        coeff = calibrate_scale(ShapeletIndex(0, int(m)), lambdas, size=cfg.size)
        results.append(coeff)
        dev = coeff.deviation
        rows.append([m, 0, repr(coeff.C), ";".join(f"{v:g}" for v in lambdas), "" if dev is None else repr(dev)])
        if coeff.flagged:
            log.warning("m=%d: C=%.4f deviates from reference by more than %.2f", m, coeff.C, DEVIATION_FLAG)
        log.info("m=%d C=%.4f", m, coeff.C)
        if cfg.curves:
            for curve in coeff.curves:
                write_csv(
                    out / f"scale_curve_m{m}_lambda{curve.wavelength:g}.csv",
                    ["beta", "C", "response"],
                    ([repr(float(b)), repr(float(c)), repr(float(r))] for b, c, r in zip(curve.beta, curve.coefficient, curve.response)),
                )
    write_csv(out / "calibration.csv", CALIBRATION_HEADER, rows)
    if cfg.figures:
        from .plotting import scale_curves_figure

        scale_curves_figure(results, out / "scale_curves.png")
    return 0


# -- analyze ----------------------------------------------------------------


def _coefficients(cfg: AnalysisConfig):
    if cfg.coefficients == "builtin":
        table, source = REFERENCE_COEFFICIENTS, "builtin"
    else:
        table, source = read_calibration_csv(cfg.coefficients), "calibration_file"
    missing = [m for m in cfg.orders if ShapeletIndex(0, int(m)) not in table]
    if missing:
        raise InvalidConfiguration(f"no scale coefficient for m={missing} in {cfg.coefficients}")
    return [(ShapeletIndex(0, int(m)), float(table[ShapeletIndex(0, int(m))])) for m in cfg.orders], source


def _reference(cfg: AnalysisConfig, shape) -> ReferenceSet:
    if cfg.ref_rect is not None:
        x, y, w, h = (int(v) for v in cfg.ref_rect)
        return ReferenceSet.from_rect(x, y, w, h, shape=shape)
    if cfg.ref_mask is not None:
        mask = load_mask(cfg.ref_mask)
        if mask.shape != tuple(shape):
            raise InvalidConfiguration(f"reference mask shape {mask.shape} does not match image {tuple(shape)}")
        return ReferenceSet.from_mask(mask)
    raise InvalidConfiguration("analyze needs a reference region (--ref-rect or --ref-mask)")


def run_analyze(cfg: AnalysisConfig) -> int:
    image = _require_input(cfg)
    if min(image.shape) < MIN_ANALYSIS_SIDE:
        raise InvalidConfiguration(f"image {image.shape} is smaller than {MIN_ANALYSIS_SIDE}x{MIN_ANALYSIS_SIDE}")
    shapelet_set, source = _coefficients(cfg)
    ref = _reference(cfg, image.shape)

    if cfg.wavelength is not None:
        lam, lam_source = float(cfg.wavelength), "override"
    else:
        sq = pad_to_square(image - image.mean())
        lam = dominant_wavelength(radial_average(spectral_density(sq)), sq.shape[0], k_min=cfg.k_min, prominence=cfg.prominence)
        lam_source = "spectrum"
    log.info("lambda = %g px (%s)", lam, lam_source)

    field_ = response_vector_field(image, shapelet_set, lam, cfg.boundary)
    dist = response_distance_map(field_, ref)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    save_field(dist.normalized, _image_path(out, "distance_map", cfg), "normalized_image")
    save_field(dist.raw, out / "distance_raw.csv", "raw_csv")
    save_field(field_.values, out / "response_vectors.csv", "raw_csv")
    for r in field_.responses:
        m = r.index.m
        save_field(r.magnitude, _image_path(out, f"magnitude_m{m}", cfg), "normalized_image")
        save_field(r.magnitude, out / f"magnitude_m{m}.csv", "raw_csv")
        save_image16(to_uint16(r.orientation, 0.0, 2 * math.pi / m), _image_path(out, f"orientation_m{m}", cfg))
        save_field(r.orientation, out / f"orientation_m{m}.csv", "raw_csv")

    summary = {
        "lambda_px": lam,
        "lambda_source": lam_source,
        "p": field_.p,
        "shapelets": [
            {"m": idx.m, "n": idx.n, "C": c, "beta_px": beta}
            for (idx, c), beta in zip(shapelet_set, field_.betas)
        ],
        "degenerate_pixel_count": int(field_.degenerate.sum()),
        "boundary_mode": cfg.boundary,
        "source_of_C": source,
        "reference_pixel_count": len(ref),
        "distance_raw": {
            "min": float(dist.raw.min()),
            "max": float(dist.raw.max()),
            "mean": float(dist.raw.mean()),
        },
        "config": cfg.to_dict(),
    }
    write_json(out / "summary.json", summary)
    if cfg.figures:
        from .plotting import analysis_figure

        refmask = np.zeros(image.shape, dtype=bool)
        refmask[ref.coords[:, 0], ref.coords[:, 1]] = True
        analysis_figure(image, dist.normalized, field_.responses, out / "analysis.png", refmask)
    return 0


RUNNERS = {
    "generate": run_generate,
    "spectrum": run_spectrum,
    "calibrate": run_calibrate,
    "analyze": run_analyze,
}


def run_pipeline(subcommand: str, config: AnalysisConfig) -> int:
    """Run one subcommand; 0 on success, 1 on analysis errors, 2 on bad configuration."""
    if subcommand not in RUNNERS:
        log.error("unknown subcommand %r", subcommand)
        return 2
    try:
        config.validate()
        return RUNNERS[subcommand](config)
    except NoDominantPeak as exc:
        log.error("NoDominantPeak: %s (supply --lambda to override)", exc)
        return 1
    except InvalidConfiguration as exc:
        log.error("invalid configuration: %s", exc)
        return 2
    except ShapeletScopeError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


def _floats(text: str):
    return [float(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shapelet-scope", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("input", nargs="?", help="input image (spectrum, analyze)")
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--lambda", dest="wavelength", type=float, help="pattern wavelength override (px)")
    parser.add_argument("--boundary", choices=("periodic", "zero"))
    ref = parser.add_mutually_exclusive_group()
    ref.add_argument("--ref-rect", type=_floats, metavar="X,Y,W,H", help="reference rectangle")
    ref.add_argument("--ref-mask", help="reference mask image")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--coefficients", help="'builtin' or a calibration CSV")
    parser.add_argument("--prominence", type=float)
    parser.add_argument("--lambdas", type=_floats, help="calibration wavelengths, comma separated")
    parser.add_argument("--curves", action="store_true", default=None, help="write per-shapelet scale curves")
    parser.add_argument("--format", dest="image_format", choices=("png", "pgm"))
    parser.add_argument("--no-figures", dest="figures", action="store_false", default=None)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        base = {}
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                base = json.load(fh)
        cfg = AnalysisConfig.from_dict(base)
    except (OSError, json.JSONDecodeError, TypeError, InvalidConfiguration) as exc:
        log.error("cannot load configuration: %s", exc)
        return 2

    overrides = {
        "input": args.input,
        "out": args.out,
        "wavelength": args.wavelength,
        "boundary": args.boundary,
        "ref_rect": None if args.ref_rect is None else [int(v) for v in args.ref_rect],
        "ref_mask": args.ref_mask,
        "coefficients": args.coefficients,
        "prominence": args.prominence,
        "lambdas": args.lambdas,
        "curves": args.curves,
        "image_format": args.image_format,
        "figures": args.figures,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.ref_rect is not None:
        cfg.ref_mask = None
    elif args.ref_mask is not None:
        cfg.ref_rect = None
    return run_pipeline(args.subcommand, cfg)


if __name__ == "__main__":
    sys.exit(main())

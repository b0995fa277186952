"""Acceptance criteria, one PASS/FAIL line each (see the summary section of the run)."""

import math
from dataclasses import replace

import numpy as np
from scipy import ndimage

from oracles import (
    circular_gap,
    correlate_direct,
    hex_modes,
    orientation_scan,
    response_at_point,
)
from shapelet_scope import NoDominantPeak
from shapelet_scope.patterns import PatternSpec, multi_grain_pattern, two_grain_spec, uniform_pattern
from shapelet_scope.response import (
    ComplexResponseField,
    ReferenceSet,
    correlate,
    optimal_orientation,
    response_distance_map,
    response_vector_field,
    shapelet_responses,
)
from shapelet_scope.scales import REFERENCE_COEFFICIENTS, beta_for, default_shapelet_set
from shapelet_scope.shapelets import ShapeletIndex, kernel_grid, render_kernel, steer_kernel
from shapelet_scope.spectral import estimate_wavelength

SET = default_shapelet_set()


def _margin(wavelength):
    """Pixels within reach of the widest kernel of the default set."""
    return max(render_kernel(i, beta_for(c, wavelength)).half_width for i, c in SET)


def test_ac1_table_reproduction(calibrated, report):
    coeffs, seconds = calibrated
    worst = max(abs(coeffs[m].C - REFERENCE_COEFFICIENTS[ShapeletIndex(0, m)]) for m in range(1, 7))
    values = " ".join(f"m{m}={coeffs[m].C:.4f}" for m in range(1, 7))
    ok = worst <= 0.02 and seconds < 300
    report("AC1 table reproduction", ok, f"{values} max|dev|={worst:.4f} time={seconds:.1f}s")
    assert ok


def _rendered_rotated(m, beta, phi):
    # independent rendering of the kernel with angular argument theta + phi
    x, y = kernel_grid(5 * beta)
    r = np.hypot(x, y)
    inside = r <= 5 * beta
    v = (r / beta) ** m * np.exp(-0.5 * (r / beta) ** 2) / beta * np.exp(-1j * m * (np.arctan2(y, x) + phi))
    v[~inside] = 0
    v[inside] -= v[inside].mean()
    return (v / np.sqrt(np.sum(np.abs(v) ** 2))).real


def test_ac2_steerability(report):
    worst = 0.0
    for m in range(1, 7):
        for beta in (4.0, 8.0):
            k = render_kernel((0, m), beta)
            for phi in np.linspace(0, 2 * math.pi, 20, endpoint=False) + 0.123:
                worst = max(worst, np.abs(steer_kernel(k, phi) - _rendered_rotated(m, beta, phi)).max())
    ok = worst <= 1e-10
    report("AC2 steerability", ok, f"max per-pixel error {worst:.2e}")
    assert ok


def test_ac3_optimal_orientation(report):
    step = 2 * math.pi / 3600
    worst_phi = worst_w = 0.0
    rng = np.random.default_rng(2024)
    fields = []
    for m in range(1, 7):
        w = rng.uniform(-1, 1, (40, 40)) + 1j * rng.uniform(-1, 1, (40, 40))
        fields.append((m, w, 1.0))
    for idx, c in SET:
        kind = "stripe" if idx.m <= 2 else "hexagonal"
        img = uniform_pattern(PatternSpec(kind, 32))
        w = correlate(img, render_kernel(idx, beta_for(c, 32))).values[::4, ::4]
        # the scan's step error scales with |w|; compare magnitudes relative to the field maximum
        fields.append((idx.m, w, np.abs(w).max()))
    for m, w, scale in fields:
        o = optimal_orientation(ComplexResponseField(ShapeletIndex(0, m), 1.0, w))
        phi, val = orientation_scan(w, m)
        worst_phi = max(worst_phi, circular_gap(o.orientation.ravel(), phi, 2 * math.pi / m).max())
        worst_w = max(worst_w, np.abs(o.magnitude.ravel() - val).max() / scale)
    ok = worst_phi <= step and worst_w <= 1e-6
    report("AC3 optimal orientation", ok, f"max phi gap {worst_phi:.2e} (<= {step:.2e}), max w* error {worst_w:.2e}")
    assert ok


def _normalise(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def test_ac4_rotation_invariance(report):
    lam = 32
    base = PatternSpec("hexagonal", lam)
    margin = _margin(lam)
    kernels = [render_kernel(i, beta_for(c, lam)) for i, c in SET]
    unrot = response_vector_field(uniform_pattern(base), SET, lam)
    mags0 = np.stack([r.magnitude for r in unrot.responses], axis=-1)
    ref = ReferenceSet.from_field(unrot, np.argwhere(np.pad(np.ones((97, 97), bool), ((80, 79), (80, 79)))))
    x0, y0 = base.center
    grid = np.arange(margin, 256 - margin, 7)
    worst_comp = 0.0
    worst_frac = 1.0
    details = []
    for deg in (10.0, 33.0, 77.0):
        phi0 = math.radians(deg)
        rot = replace(base, orientation=phi0)
        c, s = math.cos(phi0), math.sin(phi0)
        # exact correspondence: the rotated pattern at R(-phi0) p equals the unrotated one at p
        rows = []
        for py in grid:
            for px in grid:
                dx, dy = px - x0, py - y0
                qx, qy = x0 + c * dx + s * dy, y0 - s * dx + c * dy
                rows.append([abs(response_at_point(rot, k, qx, qy)) for k in kernels])
        mags1 = np.array(rows)
        mags0_s = mags0[np.ix_(grid, grid)].reshape(-1, 6)
        comp = max(
            np.abs(_normalise(mags1) - _normalise(mags0_s)).max(),
            (np.abs(mags1 - mags0_s) / mags0_s.max(axis=0)).max(),
        )
        worst_comp = max(worst_comp, comp)

        field = response_vector_field(uniform_pattern(rot), SET, lam)
        raw = response_distance_map(field, ref).raw[margin:-margin, margin:-margin]
        frac = float(np.mean(raw < 0.05))
        worst_frac = min(worst_frac, frac)
        details.append(f"{deg:g}deg: comp {comp:.1e}, below 0.05 {100 * frac:.1f}%")
    ok = worst_comp <= 1e-2 and worst_frac >= 0.99
    report("AC4 rotation invariance", ok, "; ".join(details))
    assert ok


def test_ac5_wavelength_recovery(report):
    results = []
    for kind in ("stripe", "hexagonal"):
        for lam in (16, 32, 64):
            got = estimate_wavelength(uniform_pattern(PatternSpec(kind, lam)))
            results.append((kind, lam, got))
    exact = all(got == lam for _, lam, got in results)
    try:
        estimate_wavelength(np.random.default_rng(5).random((256, 256)))
        noise_ok = False
    except NoDominantPeak:
        noise_ok = True
    ok = exact and noise_ok
    report("AC5 wavelength recovery", ok, f"{'exact' if exact else results} noise->NoDominantPeak={noise_ok}")
    assert ok


def _peaks(mag, size, margin):
    peak = (mag == ndimage.maximum_filter(mag, size=size)) & (mag > 0.5 * mag.max())
    peak[:margin] = peak[-margin:] = False
    peak[:, :margin] = peak[:, -margin:] = False
    return np.argwhere(peak)[:, ::-1].astype(float)  # (x, y)


def _nearest(a, b):
    d = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    return d.min(axis=1)


def test_ac6_response_structure(report):
    lam = 32
    margin = _margin(lam)
    stripe = PatternSpec("stripe", lam)
    hexa = PatternSpec("hexagonal", lam)
    r_stripe = shapelet_responses(uniform_pattern(stripe), SET[1:2], lam)[0].magnitude
    r_hex = {r.index.m: r.magnitude for r in shapelet_responses(uniform_pattern(hexa), SET, lam)}

    p2 = _peaks(r_stripe, lam // 4, margin)
    # stripes vary along rows; extrema every half wavelength from the origin row
    off = np.mod(p2[:, 1] - stripe.center[1], lam / 2)
    gap2 = np.minimum(off, lam / 2 - off).max()

    p6 = _peaks(r_hex[6], lam // 4, margin)
    modes = hex_modes(hexa, margin=margin)
    gap6 = max(_nearest(p6, modes).max(), _nearest(modes, p6).max())

    p1 = _peaks(r_hex[1], lam // 4, margin)
    p5 = _peaks(r_hex[5], lam // 4, margin)
    inner = margin + 4
    p1i = p1[np.all((p1 >= inner) & (p1 <= 255 - inner), axis=1)]
    p5i = p5[np.all((p5 >= inner) & (p5 <= 255 - inner), axis=1)]
    gap15 = max(_nearest(p1i, p5).max(), _nearest(p5i, p1).max())

    counts = all(len(p) > 0 for p in (p2, p6, p1i, p5i))
    ok = counts and gap2 <= 1 and gap6 <= 1 and gap15 <= 1
    report(
        "AC6 response structure",
        ok,
        f"m2/stripe extrema {gap2:.2f}px ({len(p2)} peaks), m6/modes {gap6:.2f}px ({len(p6)}), "
        f"m1 vs m5 {gap15:.2f}px ({len(p1i)}/{len(p5i)})",
    )
    assert ok


def test_ac7_defect_discrimination(report):
    lam = 16
    margin = _margin(lam)
    details = []
    ratios = []
    for kind, orientations in (("stripe", (0.0, math.pi / 2)), ("hexagonal", (0.0, math.pi / 2))):
        gs = two_grain_spec(kind, lam, orientations)
        img, band = multi_grain_pattern(gs)
        field = response_vector_field(img, SET, lam)
        # reference from the interior of the left grain
        ref = ReferenceSet.from_rect(margin, margin, 128 - lam - margin, 256 - 2 * margin)
        raw = response_distance_map(field, ref).raw
        keep = np.zeros(raw.shape, bool)
        keep[margin:-margin, margin:-margin] = True
        ratio = raw[band & keep].mean() / raw[~band & keep].mean()
        ratios.append(ratio)
        details.append(f"{kind} band/interior={ratio:.2f}")
    ok = min(ratios) >= 2
    report("AC7 defect discrimination", ok, ", ".join(details))
    assert ok


def test_ac8_oracle_equivalence(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    for m in range(1, 7):
        k = render_kernel((0, m), 4 / 3, support_radius=4.0)
        assert k.shape == (9, 9)
        img = rng.random((32, 32))
        for boundary in ("periodic", "zero"):
            fast = correlate(img, k, boundary).values
            slow = correlate_direct(img, k.values, boundary)
            worst = max(worst, np.abs(fast - slow).max() / np.abs(slow).max())
    ok = worst <= 1e-9
    report("AC8 oracle equivalence", ok, f"max relative error {worst:.2e}")
    assert ok


def test_ac9_invariance_suite(report):
    lam = 16
    img = uniform_pattern(PatternSpec("hexagonal", lam, width=128, height=128, orientation=0.4))
    img = img + 0.3 * np.random.default_rng(9).standard_normal(img.shape)
    ref = ReferenceSet.from_rect(40, 40, 30, 30)
    kernels = [render_kernel(i, beta_for(c, lam)) for i, c in SET]

    dc = max(np.abs(correlate(img + 7.5, k).values - correlate(img, k).values).max() for k in kernels)

    f1 = response_vector_field(img, SET, lam)
    f2 = response_vector_field(4.2 * img, SET, lam)
    d1 = response_distance_map(f1, ref)
    d2 = response_distance_map(f2, ref)
    mag = max(
        (np.abs(r2.magnitude - 4.2 * r1.magnitude) / (4.2 * r1.magnitude.max())).max()
        for r1, r2 in zip(f1.responses, f2.responses)
    )
    amp = max(np.abs(f1.values - f2.values).max(), np.abs(d1.raw - d2.raw).max(), np.abs(d1.normalized - d2.normalized).max())

    norms = np.linalg.norm(f1.values, axis=-1)
    unit = np.abs(norms[~f1.degenerate] - 1).max()
    zero_ok = bool(np.all(norms[f1.degenerate] == 0))
    bounds = bool(d1.raw.min() >= 0 and d1.raw.max() <= 2)

    ok = dc <= 1e-9 and mag <= 1e-9 and amp <= 1e-9 and unit <= 1e-12 and zero_ok and bounds
    report(
        "AC9 invariance suite",
        ok,
        f"DC {dc:.1e}, amplitude w* {mag:.1e}, vectors/distances {amp:.1e}, unit norm {unit:.1e}, "
        f"raw in [{d1.raw.min():.2f}, {d1.raw.max():.2f}]",
    )
    assert ok

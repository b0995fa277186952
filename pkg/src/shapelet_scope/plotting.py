"""Report figures written next to the CSV/JSON outputs."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (math.sqrt(5) - 1.0) / 2.0

params = {
    "font.family": "serif",
    "font.size": 8,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "image.cmap": "gray",
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _style():
    return plt.rc_context(params)


def spectrum_figure(sd, profile, path, wavelength=None, side=None):
    """Log spectral density (origin at centre) and its radial average."""
    with _style():
        fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(7.0, 3.2))
        h, w = sd.shape
        ax0.imshow(np.log10(1.0 + sd), extent=(-w // 2 - 0.5, w - w // 2 - 0.5, h - h // 2 - 0.5, -h // 2 - 0.5))
        ax0.set_xlabel("u")
        ax0.set_ylabel("v")
        ax0.set_title("log10(1 + |F|^2)")
        ax1.semilogy(profile.wavenumber[1:], profile.power[1:], "k-")
        if wavelength is not None and side is not None:
            ax1.axvline(side / wavelength, color="C3", ls="--", label=f"λ = {wavelength:.3g} px")
            ax1.legend(frameon=False)
        ax1.set_xlabel("radial wavenumber (bins)")
        ax1.set_ylabel("mean power")
        fig.savefig(path)
        plt.close(fig)


def scale_curves_figure(coefficients, path):
    """Normalised response versus beta, raw and rescaled by lambda / 2 pi."""
    with _style():
        fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(7.0, 7.0 * golden_mean / 2 + 0.6))
        cmap = plt.get_cmap("viridis")
        for i, coeff in enumerate(coefficients):
            color = cmap(i / max(1, len(coefficients) - 1))
            for j, curve in enumerate(coeff.curves):
                resp = curve.response / curve.response.max()
                label = f"m={coeff.shapelet.m}" if j == 0 else None
                ax0.plot(curve.beta, resp, color=color, alpha=0.8, label=label)
                ax1.plot(curve.coefficient, resp, color=color, alpha=0.8)
            ax1.axvline(coeff.C, color=color, ls=":", lw=0.8)
        ax0.set_xlabel("β (px)")
        ax0.set_ylabel("normalised w*")
        ax0.legend(frameon=False, ncol=2)
        ax1.set_xlabel("β / (λ / 2π)")
        fig.savefig(path)
        plt.close(fig)


def analysis_figure(image, distance, responses, path, reference=None):
    """Input image, normalised distance map and per-shapelet magnitude and orientation maps."""
    n = len(responses)
    with _style():
        fig, axes = plt.subplots(3, max(2, n), figsize=(1.6 * max(2, n), 5.2))
        for ax in axes.ravel():
            ax.set_axis_off()
        axes[0, 0].imshow(image)
        axes[0, 0].set_title("input")
        if reference is not None:
            axes[0, 0].contour(reference, levels=[0.5], colors="C1", linewidths=0.8)
        axes[0, 1].imshow(distance, vmin=0, vmax=1)
        axes[0, 1].set_title("response distance")
        for k, r in enumerate(responses):
            m = r.index.m
            axes[1, k].imshow(r.magnitude)
            axes[1, k].set_title(f"w*  m={m}")
            im = axes[2, k].imshow(np.degrees(r.orientation), cmap="twilight", vmin=0, vmax=360.0 / max(m, 1))
            axes[2, k].set_title(f"φ* (deg)  m={m}")
            fig.colorbar(im, ax=axes[2, k], fraction=0.046, pad=0.02)
        fig.savefig(path)
        plt.close(fig)


def pattern_figure(image, mask, path):
    with _style():
        fig, axes = plt.subplots(1, 2 if mask is not None and mask.any() else 1, figsize=(6.0, 3.0), squeeze=False)
        axes[0, 0].imshow(image)
        axes[0, 0].set_axis_off()
        if axes.shape[1] > 1:
            axes[0, 1].imshow(mask)
            axes[0, 1].set_title("boundary band")
            axes[0, 1].set_axis_off()
        fig.savefig(path)
        plt.close(fig)

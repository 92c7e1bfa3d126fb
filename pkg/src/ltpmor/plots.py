"""Figure rendering for experiment reports.

Produces the three standard plots next to the CSV output: Hankel
singular values per method, relative H-infinity error curves against
the Hankel lower bound, and periodic-versus-single projection variants.
Uses the Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

MARKERS = ["s", "o", "d", "*", "+", "x", "v", "^", "<", ">", "p", "h"]
COLORS = ["tab:green", "tab:purple", "tab:cyan", "tab:red", "tab:blue",
          "tab:orange", "tab:brown", "tab:pink", "tab:olive", "tab:gray"]


def _style(idx):
    return {"marker": MARKERS[idx % len(MARKERS)],
            "color": COLORS[idx % len(COLORS)],
            "markersize": 5, "linewidth": 1.0}


def plot_hankel(report, path):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for idx, (label, sigma) in enumerate(report.hankel.items()):
        ax.semilogy(range(1, len(sigma) + 1), sigma, linestyle="none",
                    label=label, **_style(idx))
    ax.set_xlabel("index")
    ax.set_ylabel("Hankel singular value")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_error_curves(report, path):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for idx, (label, errs) in enumerate(report.curves.items()):
        ax.semilogy(report.orders, errs, label=label, **_style(idx))
    ax.semilogy(report.orders, report.lower_bound, "k-", linewidth=1.5,
                label="lower bound")
    ax.set_xlabel("reduced order")
    ax.set_ylabel("relative H-infinity error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_variants(report, path):
    """Periodic (solid) versus single (dashed) projection error curves."""
    pairs = {}
    for label in report.curves:
        for variant, style in (("bpod-periodic-", "-"), ("bpod-single-", "--")):
            if label.startswith(variant):
                pairs.setdefault(label.removeprefix(variant), {})[style] = label
    if not pairs:
        return False
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for idx, (rop, styles) in enumerate(sorted(pairs.items())):
        for linestyle, label in styles.items():
            ax.semilogy(report.orders, report.curves[label], linestyle,
                        label=label, **_style(idx))
    ax.semilogy(report.orders, report.lower_bound, "k-", linewidth=1.5,
                label="lower bound")
    ax.set_xlabel("reduced order")
    ax.set_ylabel("relative H-infinity error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def render_figures(report, out_dir) -> list[Path]:
    """Render every applicable figure for a report; returns the paths written."""
    out = Path(out_dir)
    written = []
    path = out / "hankel_singular_values.png"
    plot_hankel(report, path)
    written.append(path)
    path = out / "error_curves.png"
    plot_error_curves(report, path)
    written.append(path)
    path = out / "projection_variants.png"
    if plot_variants(report, path):
        written.append(path)
    return written

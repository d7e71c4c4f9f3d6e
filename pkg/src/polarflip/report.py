"""Render campaign results and profiles to figure files.

Four figure kinds: FER curves (log y), error-order distribution bars,
cumulative first-error distributions, and normalized-complexity curves.
All functions write an image file and return its path.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from polarflip.errors import ContractViolation
from polarflip.harness import load_results
from polarflip.profiling import ErrorProfile, load_profile

FIGURE_KINDS = ("fer", "order_dist", "e1_cdf", "complexity")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _series_label(rec) -> str:
    label = rec.decoder
    if rec.decoder == "pscf":
        label += f" P={rec.P}"
    if rec.decoder in ("scflip", "pscf"):
        label += f" t={rec.tmax}"
    return label


def _grouped(records):
    groups = {}
    for rec in records:
        groups.setdefault(_series_label(rec), []).append(rec)
    for label, recs in groups.items():
        recs.sort(key=lambda r: r.ebn0_db)
        yield label, recs


def _curve_figure(records, out_path, value, ylabel, logy):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for label, recs in _grouped(records):
        x = [r.ebn0_db for r in recs]
        v = [getattr(r, value) for r in recs]
        ax.plot(x, v, marker="o", markersize=4, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def fer_figure(records, out_path):
    return _curve_figure(records, out_path, "fer", "FER", logy=True)


def complexity_figure(records, out_path):
    return _curve_figure(records, out_path, "avg_norm_complexity",
                         "normalized average complexity", logy=False)


def order_dist_figure(profile: ErrorProfile, out_path):
    """Bar chart of failure shares by error order."""
    plt = _pyplot()
    tallies = profile.order_tallies
    if profile.total_failures == 0:
        raise ContractViolation("profile holds no failures to plot")
    orders = np.arange(1, tallies.shape[0])
    shares = tallies[1:] / profile.total_failures
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.bar(orders, shares, width=0.8)
    ax.set_xlabel("error order")
    ax.set_ylabel("share of failed frames")
    ax.set_title(f"{profile.total_failures} failures at {profile.ebn0_db:g} dB")
    ax.grid(True, axis="y", alpha=0.4)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def e1_cdf_figure(profiles, out_path, labels: Optional[list] = None):
    """Cumulative first-error position distribution, one curve per profile."""
    plt = _pyplot()
    if isinstance(profiles, ErrorProfile):
        profiles = [profiles]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for k, prof in enumerate(profiles):
        label = labels[k] if labels and k < len(labels) else f"{prof.ebn0_db:g} dB"
        ax.plot(np.arange(prof.e1_histogram.shape[0]), prof.e1_cdf(), label=label)
    ax.set_xlabel("bit-channel index")
    ax.set_ylabel("cumulative share of first errors")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_report(results_path=None, profile_paths=(), out_dir=".",
                  kinds=FIGURE_KINDS, fmt: str = "png"):
    """Render every requested figure kind that its inputs support."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    records = load_results(results_path) if results_path else []
    profiles = [load_profile(p) for p in profile_paths]
    for kind in kinds:
        if kind not in FIGURE_KINDS:
            raise ContractViolation(f"unknown figure kind {kind!r}, pick from {FIGURE_KINDS}")
        path = os.path.join(out_dir, f"{kind}.{fmt}")
        if kind == "fer" and records:
            written.append(fer_figure(records, path))
        elif kind == "complexity" and records:
            written.append(complexity_figure(records, path))
        elif kind == "order_dist" and profiles:
            written.append(order_dist_figure(profiles[0], path))
        elif kind == "e1_cdf" and profiles:
            written.append(e1_cdf_figure(profiles, path))
    return written

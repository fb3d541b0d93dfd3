"""Figures for the reduction step, written as PNG files."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .reduction import ReductionReport  # noqa: E402

FAMILY_ORDER = ("gamma1_pos", "gamma1_neg", "gamma2_pos", "gamma2_neg", "gamma3_pos", "gamma3_neg")


def _log10(values):
    return [math.log10(v) for v in values if v > 0]


def plot_epsilons(report: ReductionReport, outdir: str | Path) -> Path:
    """Histogram of log10(epsilon) for every family, at the first admissible convergent."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fig, axes = plt.subplots(3, 2, figsize=(9, 8), sharex=True)
    for ax, cid in zip(axes.flat, FAMILY_ORDER):
        r = report.campaigns[cid]
        data = _log10(r.family.eps_samples)
        ax.hist(data, bins=60, color="0.35")
        lo = math.log10(float(r.min_epsilon))
        ax.axvline(lo, color="tab:red", lw=1)
        ax.set_title(f"{cid}  ({r.family_size} members, {len(r.family.fallbacks)} later q)", fontsize=9)
        ax.set_yscale("log")
    for ax in axes[-1]:
        ax.set_xlabel(r"$\log_{10}\varepsilon$")
    fig.tight_layout()
    path = outdir / "epsilon_distributions.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_bounds(report: ReductionReport, outdir: str | Path) -> Path:
    """Derived integer bounds next to the printed ones."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names, derived, printed = [], [], []
    for cid, r in report.campaigns.items():
        for key, val in r.derived.items():
            if val is None:
                continue
            names.append(f"{cid}:{key}")
            derived.append(val)
            printed.append(r.printed.get(key, float("nan")))
    xs = range(len(names))
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.bar([x - 0.2 for x in xs], printed, width=0.4, label="printed", color="0.7")
    ax.bar([x + 0.2 for x in xs], derived, width=0.4, label="derived", color="tab:blue")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("bound")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = outdir / "reduction_bounds.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_gamma3_grid(report: ReductionReport, outdir: str | Path) -> Path:
    """Which (k, l) members of the Gamma_3 > 0 grid needed a later convergent."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 5))
    for cid, color in (("gamma3_pos", "tab:blue"), ("gamma3_neg", "tab:orange")):
        pts = [lab for lab, _ in report.campaigns[cid].family.fallbacks]
        if pts:
            ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=2, color=color, label=cid)
    ax.set_xlabel("k = n - n1")
    ax.set_ylabel("l = m - m1")
    ax.legend(frameon=False, markerscale=4)
    fig.tight_layout()
    path = outdir / "gamma3_fallbacks.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_figures(report: ReductionReport, outdir: str | Path) -> list[Path]:
    return [plot_epsilons(report, outdir), plot_bounds(report, outdir), plot_gamma3_grid(report, outdir)]

"""Matplotlib figures for the report path: sweep curves and rate bars."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluate import RateReport, SweepResult


def save_sweep_figure(result: SweepResult, path: Path | str) -> None:
    """Single/both/overall detection rate versus threshold, one curve each."""
    ths = [row.th for row in result.rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ths, [r.single_rate for r in result.rows], "s--", label="single", color="tab:orange")
    ax.plot(ths, [r.both_rate for r in result.rows], "o--", label="both", color="tab:blue")
    ax.plot(ths, [r.overall_rate for r in result.rows], "^-", label="overall", color="tab:green")
    ax.axvline(result.best_th, color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel("threshold")
    ax.set_ylabel("detection rate (%)")
    ax.set_ylim(-2, 102)
    ax.set_title(
        f"{result.region}: rate vs threshold "
        f"(best {result.best_th:.{result.decimals}f}, radius {result.radius_frac:g} IOD)"
    )
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_rates_figure(report: RateReport, path: Path | str) -> None:
    """Grouped bars of both/single/overall rate per region plus the average."""
    rows = [*report.rows, report.average]
    labels = [r.region for r in rows]
    xs = range(len(rows))
    width = 0.28
    fig, ax = plt.subplots(figsize=(9, 4.5))
    ax.bar([x - width for x in xs], [r.both_rate for r in rows], width, label="both")
    ax.bar(list(xs), [r.single_rate for r in rows], width, label="single")
    ax.bar([x + width for x in xs], [r.overall_rate for r in rows], width, label="overall")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("detection rate (%)")
    ax.set_ylim(0, 105)
    ax.set_title(
        f"Detection rates over {report.n_images} image(s), radius {report.radius_frac:g} IOD"
    )
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)

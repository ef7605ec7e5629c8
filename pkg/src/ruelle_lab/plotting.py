"""Static figures written next to the CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# keep PNG bytes reproducible across runs
_SAVE_KW = {"dpi": 120, "metadata": {"Software": None}}


def plot_scan(rows: list, path: Path) -> Path:
    ok = [r for r in rows if r.get("status") == "ok"]
    betas = [r["beta"] for r in ok]
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.4))
    for ax, key, label in zip(axes, ("pressure", "energy", "entropy"),
                              ("pressure  log λ", "energy  ∫f dμ", "specific entropy")):
        ax.plot(betas, [r[key] for r in ok], "o-", ms=3, lw=1.2)
        ax.set_xlabel("β")
        ax.set_title(label, fontsize=10)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def plot_entropy(report, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(report.n_values, report.rates, "o-", ms=3, lw=1.2, label="H_n / n")
    if report.extrapolated_limit is not None and abs(report.extrapolated_limit) != float("inf"):
        ax.axhline(report.extrapolated_limit, color="k", lw=0.8, ls="--", label="limit")
    ax.set_xlabel("n")
    ax.set_title(report.label.replace("_", " "), fontsize=10)
    ax.legend(frameon=False, fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path

"""Figure rendering for stats reports."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .stats import CATEGORIES, LABELS, SuiteStats  # noqa: E402


def plot_volumes(rows: Sequence[SuiteStats], path, log_scale: bool = True) -> Path:
    """Grouped bars of per-category means with min-max whiskers, one group per category."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(1, len(rows))
    for k, row in enumerate(rows):
        xs = [c + (k - (len(rows) - 1) / 2) * width for c in range(len(CATEGORIES))]
        cats = [row.categories[c] for c in CATEGORIES]
        means = [s.mean for s in cats]
        lo = [s.mean - s.min for s in cats]
        hi = [s.max - s.mean for s in cats]
        ax.bar(xs, means, width, yerr=[lo, hi], capsize=3, label=row.name or f"set {k + 1}")
    ax.set_xticks(range(len(CATEGORIES)))
    ax.set_xticklabels([LABELS[c] for c in CATEGORIES])
    ax.set_ylabel("cases per task")
    if log_scale and any(s.max > 0 for r in rows for s in r.categories.values()):
        ax.set_yscale("symlog", linthresh=1)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path

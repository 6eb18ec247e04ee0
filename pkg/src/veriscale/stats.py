"""Suite-volume statistics in the ``Mean (Min-Max) xMultiplier`` layout."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import EmptySuiteSet
from .suite import TestSuite

CATEGORIES = ("expected_pairs", "unexpected_outputs", "unexpected_inputs")
LABELS = {
    "expected_pairs": "Expected Input-Output",
    "unexpected_outputs": "Unexpected Output",
    "unexpected_inputs": "Unexpected Input",
}


@dataclass(frozen=True)
class CategoryStats:
    mean: float
    min: int
    max: int
    multiplier: float | None = None

    def cell(self) -> str:
        s = f"{self.mean:.2f} ({self.min}-{self.max})"
        if self.multiplier is not None:
            s += f" x{self.multiplier:.2f}"
        return s


@dataclass
class SuiteStats:
    name: str
    n_suites: int
    categories: dict[str, CategoryStats] = field(default_factory=dict)

    def means(self) -> tuple[float, ...]:
        return tuple(self.categories[c].mean for c in CATEGORIES)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n_suites": self.n_suites,
            "categories": {
                c: {
                    "mean": round(s.mean, 2),
                    "min": s.min,
                    "max": s.max,
                    **({"multiplier": s.multiplier} if s.multiplier is not None else {}),
                }
                for c, s in self.categories.items()
            },
        }


def multiplier(mean: float, baseline_mean: float) -> float | None:
    if baseline_mean == 0:
        return None
    return round(mean / baseline_mean, 2)


def stats_from_counts(
    counts: Sequence[Sequence[int]],
    baseline_means: Sequence[float] | None = None,
    name: str = "",
) -> SuiteStats:
    """``counts`` holds one (expected, unexpected outputs, unexpected inputs) triple per suite."""
    if not counts:
        raise EmptySuiteSet("no suites to summarise")
    out = SuiteStats(name=name, n_suites=len(counts))
    for k, cat in enumerate(CATEGORIES):
        col = [int(c[k]) for c in counts]
        mean = sum(col) / len(col)
        mult = multiplier(mean, baseline_means[k]) if baseline_means is not None else None
        out.categories[cat] = CategoryStats(mean, min(col), max(col), mult)
    return out


def compute_stats(
    suites: Sequence[TestSuite],
    baseline_suites: Sequence[TestSuite] | None = None,
    name: str = "",
) -> SuiteStats:
    base = None
    if baseline_suites is not None:
        base = stats_from_counts([s.counts() for s in baseline_suites]).means()
    return stats_from_counts([s.counts() for s in suites], base, name)


def render_table(rows: Sequence[SuiteStats]) -> str:
    """Aligned plain-text table, one row per suite set."""
    header = ["Dataset", *(LABELS[c] for c in CATEGORIES)]
    body = [[r.name or "-", *(r.categories[c].cell() for c in CATEGORIES)] for r in rows]
    widths = [max(len(line[i]) for line in [header, *body]) for i in range(len(header))]
    fmt = lambda line: "  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip()
    rule = "  ".join("-" * w for w in widths)
    return "\n".join([fmt(header), rule, *map(fmt, body)]) + "\n"


def render_tsv(rows: Sequence[SuiteStats]) -> str:
    cols = ["dataset", "n_suites"]
    for c in CATEGORIES:
        cols += [f"{c}_mean", f"{c}_min", f"{c}_max", f"{c}_multiplier"]
    lines = ["\t".join(cols)]
    for r in rows:
        cells = [r.name, str(r.n_suites)]
        for c in CATEGORIES:
            s = r.categories[c]
            cells += [f"{s.mean:.2f}", str(s.min), str(s.max), "" if s.multiplier is None else f"{s.multiplier:.2f}"]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"

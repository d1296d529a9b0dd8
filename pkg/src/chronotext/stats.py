"""Per-decade word count statistics and their CSV/SVG reports."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from statistics import fmean, median, pstdev

from .cleaning import word_count
from .corpus import CorpusManifest, DecadeLabel
from .errors import EmptyInput, MissingText


@dataclass(frozen=True)
class LengthStats:
    n: int
    min: int
    max: int
    mean: float
    median: float
    std: float


def length_stats(counts: list[int]) -> LengthStats:
    """Summary statistics of a list of word counts.

    The spread is the population standard deviation (divide by n, not n-1);
    the median of an even-sized list is the mean of the two middle values.
    """
    if not counts:
        raise EmptyInput("no word counts to summarize")
    return LengthStats(
        n=len(counts),
        min=min(counts),
        max=max(counts),
        mean=fmean(counts),
        median=float(median(counts)),
        std=pstdev(counts),
    )


def decade_word_counts(
    manifest: CorpusManifest, texts: dict[str, str]
) -> dict[int, list[int]]:
    """Word counts per article, grouped by decade, chronological key order."""
    grouped: dict[int, list[int]] = {}
    for row in manifest.rows:
        if row.id not in texts:
            raise MissingText(f"no text for article {row.id}")
        grouped.setdefault(row.decade.decade_start, []).append(
            word_count(texts[row.id])
        )
    return {d: grouped[d] for d in sorted(grouped)}


def decade_stats(
    manifest: CorpusManifest, texts: dict[str, str]
) -> dict[int, LengthStats]:
    return {
        decade: length_stats(counts)
        for decade, counts in decade_word_counts(manifest, texts).items()
    }


def stats_csv(table: dict[int, LengthStats]) -> str:
    lines = ["decade,articles,min,max,mean,median,std"]
    for decade in sorted(table):
        s = table[decade]
        lines.append(
            f"{DecadeLabel(decade).name},{s.n},{s.min},{s.max},"
            f"{s.mean:.4f},{s.median:.4f},{s.std:.4f}"
        )
    return "\n".join(lines) + "\n"


def write_stats_csv(table: dict[int, LengthStats], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(stats_csv(table), encoding="utf-8", newline="\n")


def stats_svg(table: dict[int, LengthStats]) -> str:
    """Bar chart of mean words per article with one std whisker per bar."""
    if not table:
        raise EmptyInput("no decade statistics to plot")
    width, height = 640, 360
    left, right, top, bottom = 60, 20, 40, 50
    plot_w = width - left - right
    plot_h = height - top - bottom
    decades = sorted(table)
    peak = max(table[d].mean + table[d].std for d in decades)
    peak = peak if peak > 0 else 1.0
    slot = plot_w / len(decades)
    bar_w = slot * 0.6

    def y(value: float) -> float:
        return top + plot_h * (1.0 - value / peak)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15">'
        "Mean words per article by decade (whiskers: one std dev)</text>",
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="#333333"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        'stroke="#333333"/>',
    ]
    for tick in range(5):
        value = peak * tick / 4
        parts.append(
            f'<text x="{left - 6}" y="{y(value) + 4:.1f}" text-anchor="end" '
            f'fill="#555555">{value:.0f}</text>'
        )
    for i, decade in enumerate(decades):
        s = table[decade]
        cx = left + slot * (i + 0.5)
        x0 = cx - bar_w / 2
        parts.append(
            f'<rect x="{x0:.1f}" y="{y(s.mean):.1f}" width="{bar_w:.1f}" '
            f'height="{top + plot_h - y(s.mean):.1f}" fill="#4878a8"/>'
        )
        lo, hi = max(0.0, s.mean - s.std), s.mean + s.std
        parts.append(
            f'<line x1="{cx:.1f}" y1="{y(lo):.1f}" x2="{cx:.1f}" '
            f'y2="{y(hi):.1f}" stroke="#222222" stroke-width="1.5"/>'
        )
        for w_value in (lo, hi):
            parts.append(
                f'<line x1="{cx - 6:.1f}" y1="{y(w_value):.1f}" '
                f'x2="{cx + 6:.1f}" y2="{y(w_value):.1f}" stroke="#222222"/>'
            )
        parts.append(
            f'<text x="{cx:.1f}" y="{top + plot_h + 18}" text-anchor="middle">'
            f"{DecadeLabel(decade).name}</text>"
        )
        parts.append(
            f'<text x="{cx:.1f}" y="{top + plot_h + 34}" text-anchor="middle" '
            f'fill="#555555">{s.mean:.1f}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_stats_svg(table: dict[int, LengthStats], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(stats_svg(table), encoding="utf-8", newline="\n")

"""Report rendering: per-dataset tables in markdown, plain text, CSV, plots.

Values render as percentages with one decimal (the convention used in the
benchmarked tables); the best mean per column is bolded in markdown and
starred in plain text.  Output is deterministic so regenerated files are
byte-identical.
"""

from __future__ import annotations

from pathlib import Path

from .engine import AGGREGATE_METRICS, RunAggregate

PRF_COLUMNS = ("precision", "recall", "f1")
AREA_COLUMNS = ("auroc", "aupr")


def fmt_pm(mean: float, std: float) -> str:
    return f"{100 * mean:.1f}±{100 * std:.1f}"


def _best_by_column(aggregates, columns):
    best = {}
    for col in columns:
        best[col] = max(a.mean(col) for a in aggregates)
    return best


def _table(aggregates, columns, marker):
    best = _best_by_column(aggregates, columns)
    rows = []
    for agg in aggregates:
        cells = [agg.detector]
        for col in columns:
            text = fmt_pm(agg.mean(col), agg.std(col))
            if agg.mean(col) == best[col]:
                text = marker(text)
            cells.append(text)
        rows.append(cells)
    return rows


def _markdown_table(aggregates, columns) -> str:
    header = ["detector", *columns]
    rows = _table(aggregates, columns, lambda s: f"**{s}**")
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(["---"] * len(header)) + "|"]
    for cells in rows:
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines)


def _text_table(aggregates, columns) -> str:
    header = ["detector", *columns]
    rows = [header] + _table(aggregates, columns, lambda s: f"*{s}")
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(header))]
    lines = []
    for i, cells in enumerate(rows):
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_report(aggregates: list[RunAggregate], out_dir) -> dict[str, list[Path]]:
    """Write aggregate.csv, report.md, report.txt and plots/ per dataset."""
    out_dir = Path(out_dir)
    written: dict[str, list[Path]] = {}
    datasets = sorted({a.dataset for a in aggregates})
    for dataset in datasets:
        group = sorted(
            (a for a in aggregates if a.dataset == dataset), key=lambda a: a.detector
        )
        base = out_dir / dataset
        base.mkdir(parents=True, exist_ok=True)
        paths = []

        csv_path = base / "aggregate.csv"
        header = ["detector", "n_runs"]
        for metric in AGGREGATE_METRICS:
            header += [f"{metric}_mean", f"{metric}_std"]
        lines = [",".join(header)]
        for agg in group:
            cells = [agg.detector, str(agg.n_runs)]
            for metric in AGGREGATE_METRICS:
                cells += [f"{agg.mean(metric):.10g}", f"{agg.std(metric):.10g}"]
            lines.append(",".join(cells))
        csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(csv_path)

        md_path = base / "report.md"
        md = [
            f"# {dataset}",
            "",
            "Values are percentages, mean±std over runs; best mean per column in bold.",
            "",
            "## Precision / Recall / F1",
            "",
            _markdown_table(group, PRF_COLUMNS),
            "",
            "## AUROC / AUPR",
            "",
            _markdown_table(group, AREA_COLUMNS),
            "",
        ]
        md_path.write_text("\n".join(md), encoding="utf-8")
        paths.append(md_path)

        txt_path = base / "report.txt"
        txt = [
            f"{dataset} (percent, mean±std; * marks the best mean)",
            "",
            _text_table(group, PRF_COLUMNS),
            "",
            _text_table(group, AREA_COLUMNS),
            "",
        ]
        txt_path.write_text("\n".join(txt), encoding="utf-8")
        paths.append(txt_path)

        plots = base / "plots"
        plots.mkdir(exist_ok=True)
        for metric in AGGREGATE_METRICS:
            plot_path = plots / f"{metric}.csv"
            lines = ["detector,mean,std"]
            for agg in group:
                lines.append(
                    f"{agg.detector},{agg.mean(metric):.10g},{agg.std(metric):.10g}"
                )
            plot_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            paths.append(plot_path)
        written[dataset] = paths
    return written

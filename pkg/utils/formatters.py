"""Console formatting for evaluation reports.

Functions:
- format_ap(value: Optional[float]) -> str
- format_summary_line(report: EvalReport) -> str
- format_comparison_table(reports: list[EvalReport]) -> str
- format_fit(model: LatencyModel) -> str
"""

from typing import TYPE_CHECKING, Optional

from latency.models import LatencyModel

if TYPE_CHECKING:
    from streameval.evaluator import EvalReport

# Column title -> EvalReport AP field, in table order
AP_COLUMNS = {
    "sAP": "sap",
    "sAP50": "sap50",
    "sAP75": "sap75",
    "sAP_S": "sap_small",
    "sAP_M": "sap_medium",
    "sAP_L": "sap_large",
}

NOT_AVAILABLE = "n/a"


def format_ap(value: Optional[float]) -> str:
    """Format an AP fraction in points: 0.367 -> "36.7".

    Args:
        value: AP in [0, 1], or None when there was nothing to score

    Returns:
        Percent with one decimal, or "n/a"
    """
    if value is None:
        return NOT_AVAILABLE
    return f"{100.0 * value:.1f}"


def format_summary_line(report: "EvalReport") -> str:
    """One line per policy: headline sAP, mean delay and dropped frames.

    Args:
        report: Evaluation report of one policy

    Returns:
        Line like "delay_adaptive  sAP 36.7  mean delay 24.1 ms  dropped 12"
    """
    stats = report.delay_stats
    return (
        f"{report.policy:<16} sAP {format_ap(report.sap):>5}  "
        f"mean delay {stats.mean_ms:.1f} ms  "
        f"over budget {100.0 * report.realtime_violation_rate:.1f}%  "
        f"dropped {report.dropped_frames}"
    )


def format_comparison_table(reports: list["EvalReport"]) -> str:
    """Fixed-width table with one row per report (AP columns then delay stats)."""
    headers = ["policy", *AP_COLUMNS, "mean ms", "std ms", "min ms", "max ms"]
    rows = []
    for report in reports:
        stats = report.delay_stats
        rows.append([
            report.policy,
            *(format_ap(getattr(report, attr)) for attr in AP_COLUMNS.values()),
            f"{stats.mean_ms:.1f}",
            f"{stats.std_ms:.2f}",
            f"{stats.min_ms:.1f}",
            f"{stats.max_ms:.1f}",
        ])

    widths = [max(len(row[i]) for row in [headers, *rows]) for i in range(len(headers))]
    lines = [
        "  ".join(cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(row, widths)))
        for row in [headers, *rows]
    ]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines)


def format_fit(model: LatencyModel) -> str:
    """Fitted parameters and analytic moments of a latency model."""
    mean, std = model.analytic_moments()
    if model.std_ms == 0:
        return f"constant delay {model.mean_ms:.3f} ms"
    return "\n".join([
        f"shift (min_ms)  {model.min_ms:.6f}",
        f"mu              {model.log_mu:.6f}",
        f"sigma           {model.log_sigma:.6f}",
        f"analytic mean   {mean:.6f} ms",
        f"analytic std    {std:.6f} ms",
    ])

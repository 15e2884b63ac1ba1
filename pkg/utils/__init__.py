"""Shared helpers for digests and console output.

Modules:
- digest: Canonical JSON and sha256 content digests
- formatters: Report summary lines and comparison tables
"""

from utils.digest import canonical_json, digest
from utils.formatters import (
    format_ap,
    format_comparison_table,
    format_fit,
    format_summary_line,
)

__all__ = [
    "canonical_json",
    "digest",
    "format_ap",
    "format_comparison_table",
    "format_fit",
    "format_summary_line",
]

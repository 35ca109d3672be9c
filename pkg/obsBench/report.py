"""
评测报告输出
Author: ICO
Date: 2024-03-31"""

from pathlib import Path

from dataExchange import write_summary, write_table

from .harness import BenchmarkReport


def write_report(report: BenchmarkReport, out_dir: str | Path) -> tuple[Path, Path]:
    """写出 metrics.csv 与 summary.json"""
    out_dir = Path(out_dir)
    return write_table(report.metrics, out_dir / "metrics.csv"), write_summary(report.summary, out_dir / "summary.json")


# end def

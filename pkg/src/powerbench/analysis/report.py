"""Report emitters: JSON documents, CDF CSVs, gnuplot-friendly .dat files."""

from __future__ import annotations

import json
from pathlib import Path

from .stats import GroupReport, empirical_cdf


def write_json_report(path: Path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_cdf_csv(path: Path, samples):
    values, fractions = empirical_cdf(samples)
    with open(path, "w", newline="\n") as fh:
        fh.write("value,fraction\n")
        for v, f in zip(values, fractions):
            fh.write(f"{v:.6f},{f:.6f}\n")


def write_cdf_dat(path: Path, samples):
    values, fractions = empirical_cdf(samples)
    with open(path, "w", newline="\n") as fh:
        fh.write("# value fraction\n")
        for v, f in zip(values, fractions):
            fh.write(f"{v:.6f} {f:.6f}\n")


def write_group_bars_dat(path: Path, report: GroupReport):
    """One row per group: name, mean discharge, std (errorbar)."""
    with open(path, "w", newline="\n") as fh:
        fh.write("# group mean_mah std_mah\n")
        for group in report.order:
            s = report.summaries[group]
            fh.write(f"{group} {s.mean:.6f} {s.std:.6f}\n")

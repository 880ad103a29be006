"""Quantiles, CDFs, repetition summaries, group comparison, latency stats."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    BadQ,
    EmptyInput,
    LossyTrace,
    NegativeLatency,
    NoValidTraces,
    TooFewGroups,
    TooFewSamples,
)
from .discharge import DEFAULT_LOSS_THRESHOLD, integrate_discharge
from .trace import Trace

CDF_MAX_POINTS = 100_000
SUMMARY_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def quantile(samples, q: float) -> float:
    """Nearest-rank quantile: value at 1-based index ceil(q * n) of the sort."""
    values = np.sort(np.asarray(samples, dtype=float))
    if len(values) == 0:
        raise EmptyInput("no samples")
    if not (0.0 <= q <= 1.0):
        raise BadQ(str(q))
    rank = max(1, math.ceil(q * len(values)))
    return float(values[rank - 1])


def empirical_cdf(samples, max_points: int = CDF_MAX_POINTS):
    """Ordered (value, fraction) step points; rank-subsampled for huge inputs."""
    values = np.sort(np.asarray(samples, dtype=float))
    n = len(values)
    if n == 0:
        raise EmptyInput("no samples")
    ranks = np.arange(1, n + 1)
    if n > max_points:
        keep = np.unique(np.linspace(0, n - 1, max_points).astype(int))
        values, ranks = values[keep], ranks[keep]
    return values, ranks / n


@dataclass(frozen=True)
class MeasurementSummary:
    discharge_mah: float
    mean_current_ma: float
    median_current_ma: float
    duration_s: float
    sample_loss_fraction: float
    quantiles_ma: dict

    def to_dict(self) -> dict:
        return {
            "discharge_mah": self.discharge_mah,
            "mean_current_ma": self.mean_current_ma,
            "median_current_ma": self.median_current_ma,
            "duration_s": self.duration_s,
            "sample_loss_fraction": self.sample_loss_fraction,
            "quantiles_ma": {str(k): v for k, v in self.quantiles_ma.items()},
        }


def summarize_trace(trace: Trace, loss_threshold: float = DEFAULT_LOSS_THRESHOLD,
                    force: bool = False) -> MeasurementSummary:
    q = integrate_discharge(trace, loss_threshold=loss_threshold, force=force)
    return MeasurementSummary(
        discharge_mah=q,
        mean_current_ma=float(np.mean(trace.current_ma)),
        median_current_ma=quantile(trace.current_ma, 0.5),
        duration_s=trace.duration,
        sample_loss_fraction=trace.meta.sample_loss_fraction,
        quantiles_ma={p: quantile(trace.current_ma, p) for p in SUMMARY_QUANTILES},
    )


@dataclass(frozen=True)
class RunSummary:
    n: int
    mean: float
    std: float
    values: tuple

    def to_dict(self) -> dict:
        return {"n": self.n, "mean": self.mean, "std": self.std,
                "values": list(self.values)}


def summarize_runs(traces, loss_threshold: float = DEFAULT_LOSS_THRESHOLD) -> RunSummary:
    """Mean and sample std (n-1) of discharge over one group's repetitions."""
    discharges = []
    for tr in traces:
        try:
            discharges.append(integrate_discharge(tr, loss_threshold=loss_threshold))
        except (LossyTrace, TooFewSamples):
            continue
    if not discharges:
        raise NoValidTraces()
    arr = np.asarray(discharges)
    std = float(np.std(arr, ddof=1)) if len(arr) > 1 else 0.0
    return RunSummary(n=len(arr), mean=float(np.mean(arr)), std=std,
                      values=tuple(arr.tolist()))


@dataclass(frozen=True)
class GroupReport:
    order: tuple                 # group names, ascending mean discharge
    summaries: dict              # group -> RunSummary
    pairwise_mean_diff: dict     # (a, b) -> mean_a - mean_b

    def to_dict(self) -> dict:
        return {
            "order": list(self.order),
            "summaries": {g: s.to_dict() for g, s in self.summaries.items()},
            "pairwise_mean_diff": {f"{a}-{b}": d
                                   for (a, b), d in self.pairwise_mean_diff.items()},
        }


def compare_groups(groups: dict) -> GroupReport:
    """groups: name -> RunSummary or list of traces."""
    if len(groups) < 2:
        raise TooFewGroups(str(len(groups)))
    summaries = {g: (v if isinstance(v, RunSummary) else summarize_runs(v))
                 for g, v in groups.items()}
    order = tuple(sorted(summaries, key=lambda g: summaries[g].mean))
    names = list(summaries)
    pairwise = {(a, b): summaries[a].mean - summaries[b].mean
                for i, a in enumerate(names) for b in names[i + 1:]}
    return GroupReport(order=order, summaries=summaries, pairwise_mean_diff=pairwise)


@dataclass(frozen=True)
class LatencyStats:
    n: int
    mean: float
    std: float
    samples: tuple

    def to_dict(self) -> dict:
        return {"n": self.n, "mean": self.mean, "std": self.std,
                "samples": list(self.samples)}


def latency_stats(probes) -> LatencyStats:
    """probes: (t_input, t_first_changed_frame) pairs."""
    if not probes:
        raise EmptyInput("no probes")
    lat = []
    for t_in, t_frame in probes:
        if t_frame < t_in:
            raise NegativeLatency(f"{t_frame} < {t_in}")
        lat.append(t_frame - t_in)
    arr = np.asarray(lat)
    std = float(np.std(arr, ddof=1)) if len(arr) > 1 else 0.0
    return LatencyStats(n=len(arr), mean=float(np.mean(arr)), std=std,
                        samples=tuple(arr.tolist()))

from .discharge import DEFAULT_LOSS_THRESHOLD, energy_mwh, integrate_discharge
from .report import (
    write_cdf_csv,
    write_cdf_dat,
    write_group_bars_dat,
    write_json_report,
)
from .stats import (
    GroupReport,
    LatencyStats,
    MeasurementSummary,
    RunSummary,
    compare_groups,
    empirical_cdf,
    latency_stats,
    quantile,
    summarize_runs,
    summarize_trace,
)
from .trace import Trace

__all__ = [
    "DEFAULT_LOSS_THRESHOLD", "energy_mwh", "integrate_discharge",
    "write_cdf_csv", "write_cdf_dat", "write_group_bars_dat",
    "write_json_report", "GroupReport", "LatencyStats", "MeasurementSummary",
    "RunSummary", "compare_groups", "empirical_cdf", "latency_stats",
    "quantile", "summarize_runs", "summarize_trace", "Trace",
]

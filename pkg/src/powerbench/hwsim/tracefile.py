"""Trace persistence: CSV sample files plus a JSON metadata sidecar.

CSV format: header ``t_s,current_ma,voltage_v``, one row per sample, LF line
endings, 6 fractional digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_HEADER = "t_s,current_ma,voltage_v"


@dataclass
class TraceMeta:
    device: str = ""
    job_id: int | None = None
    repetition: int = 0
    rate: int = 5000
    voltage: float = 0.0
    seed: int = 0
    gaps: list = field(default_factory=list)
    clamped: bool = False
    delivered: int = 0
    lost: int = 0
    duration_s: float = 0.0
    energy_mwh: float | None = None

    @property
    def sample_loss_fraction(self) -> float:
        total = self.delivered + self.lost
        return self.lost / total if total else 0.0

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["gaps"] = [list(g) for g in self.gaps]
        d["sample_loss_fraction"] = self.sample_loss_fraction
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TraceMeta":
        d = dict(d)
        d.pop("sample_loss_fraction", None)
        d["gaps"] = [tuple(g) for g in d.get("gaps", [])]
        return cls(**d)


class TraceWriter:
    """Streams sample batches to a CSV file as they are drained."""

    def __init__(self, path: Path, meta: TraceMeta):
        self.path = Path(path)
        self.meta = meta
        self._fh = open(self.path, "w", newline="\n")
        self._fh.write(CSV_HEADER + "\n")

    def write_batch(self, indices: np.ndarray, currents: np.ndarray):
        if len(indices) == 0:
            return
        t = indices / self.meta.rate
        v = np.full(len(indices), self.meta.voltage)
        block = np.column_stack((t, currents, v))
        np.savetxt(self._fh, block, fmt="%.6f", delimiter=",")

    def finalize(self, stats=None):
        self._fh.close()
        if stats is not None:
            self.meta.gaps = [tuple(g) for g in stats.gaps]
            self.meta.delivered = stats.delivered
            self.meta.lost = stats.lost
            self.meta.duration_s = stats.duration
        self.meta_path().write_text(json.dumps(self.meta.to_dict(), indent=2) + "\n")

    def meta_path(self) -> Path:
        return self.path.with_suffix(".meta.json")


def read_trace(path: Path):
    """Load (t, current_ma, voltage_v) arrays and metadata for one trace."""
    path = Path(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        data = data.reshape(0, 3)
    meta_path = path.with_suffix(".meta.json")
    meta = TraceMeta.from_dict(json.loads(meta_path.read_text())) if meta_path.exists() else TraceMeta()
    return data[:, 0], data[:, 1], data[:, 2], meta

"""Immutable trace snapshot used by all analysis operations."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..hwsim.tracefile import TraceMeta, read_trace


@dataclass(frozen=True)
class Trace:
    t: np.ndarray
    current_ma: np.ndarray
    voltage_v: np.ndarray
    meta: TraceMeta

    def __post_init__(self):
        if len(self.t) != len(self.current_ma):
            raise ValueError("t and current length mismatch")
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("timestamps must be strictly increasing")

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0]) if len(self.t) > 1 else 0.0

    @classmethod
    def from_file(cls, path: Path) -> "Trace":
        t, i, v, meta = read_trace(path)
        return cls(t=t, current_ma=i, voltage_v=v, meta=meta)

    @classmethod
    def synthetic(cls, t, current_ma, voltage: float = 4.0, **meta_kw) -> "Trace":
        t = np.asarray(t, dtype=float)
        i = np.asarray(current_ma, dtype=float)
        meta_kw.setdefault("delivered", len(t))
        meta = TraceMeta(voltage=voltage, **meta_kw)
        return cls(t=t, current_ma=i, voltage_v=np.full(len(t), voltage), meta=meta)

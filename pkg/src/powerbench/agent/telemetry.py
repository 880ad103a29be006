"""Simulated controller telemetry (CPU / memory / upload rate).

Calibration: meter polling keeps one core busy (~25% total) whenever a
measurement is running; the mirroring encoder roughly triples that, with a
bounded 1 Mbps upload stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CPU_IDLE_PCT = 4.0
CPU_SAMPLING_PCT = 25.0     # meter polling at full rate
CPU_MIRRORING_PCT = 50.0    # screen encoder on top
MEM_IDLE_PCT = 14.0
MEM_MIRRORING_PCT = 6.0
MIRROR_UPLOAD_BPS = 125_000  # 1 Mbps encoder ceiling


@dataclass
class TelemetrySample:
    t: float
    cpu_pct: float
    mem_pct: float
    net_up_bps: float


@dataclass
class ControllerTelemetry:
    seed: int = 0
    period_s: float = 1.0
    noise_sigma: float = 2.0
    samples: list = field(default_factory=list)
    _rng: np.random.Generator = field(default=None, repr=False)

    def __post_init__(self):
        self._rng = np.random.default_rng(self.seed)

    def record(self, t: float, sampling: bool, mirroring: bool) -> TelemetrySample:
        cpu = CPU_IDLE_PCT
        if sampling:
            cpu += CPU_SAMPLING_PCT - CPU_IDLE_PCT
        if mirroring:
            cpu += CPU_MIRRORING_PCT
        if self.noise_sigma > 0:
            cpu += float(self._rng.normal(0.0, self.noise_sigma))
        mem = MEM_IDLE_PCT + (MEM_MIRRORING_PCT if mirroring else 0.0)
        if self.noise_sigma > 0:
            mem += float(self._rng.normal(0.0, self.noise_sigma / 4.0))
        net = MIRROR_UPLOAD_BPS * (1.0 if mirroring else 0.0)
        sample = TelemetrySample(
            t=t,
            cpu_pct=min(max(cpu, 0.0), 100.0),
            mem_pct=min(max(mem, 0.0), 100.0),
            net_up_bps=max(net, 0.0),
        )
        self.samples.append(sample)
        return sample

    def latest(self) -> TelemetrySample | None:
        return self.samples[-1] if self.samples else None

"""Fixed-grid sample stream with a bounded drop-oldest buffer.

Samples sit on the exact grid t_i = i / rate. The producer emits in bulk per
simulation step; a slow consumer loses the oldest pending samples, which are
recorded as gaps instead of silently vanishing.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

CURRENT_CLAMP_MA = 6000.0


@dataclass(frozen=True)
class PowerSample:
    t: float          # seconds since stream start
    current: float    # mA
    voltage: float    # V


@dataclass(frozen=True)
class TraceStats:
    delivered: int
    lost: int
    duration: float
    gaps: tuple  # tuple of (first_lost_index, last_lost_index) inclusive


class SampleStream:
    def __init__(self, rate: int, voltage: float, capacity: int = 65536,
                 noise_sigma: float = 0.0, seed: int = 0):
        self.rate = int(rate)
        self.voltage = float(voltage)
        self.capacity = int(capacity)
        self.noise_sigma = float(noise_sigma)
        self.seed = int(seed)
        self._rng = np.random.default_rng(seed)
        self._elapsed = Fraction(0)
        self._next_i = 0            # next sample index to generate
        self._chunks: deque = deque()   # (start_index, np.ndarray of currents)
        self._buffered = 0
        self._read_cursor = 0       # next index expected by the consumer
        self.gaps: list[tuple[int, int]] = []
        self.lost = 0
        self.clamped = False
        self.closed = False

    # -- producer --------------------------------------------------------------

    def emit_interval(self, current_ma: float, dt: Fraction):
        """Generate all grid samples falling inside [elapsed, elapsed + dt)."""
        if self.closed:
            raise RuntimeError("emit on closed stream")
        self._elapsed += dt
        target = self._elapsed * self.rate          # exact Fraction
        n_total = math.ceil(target) if target != int(target) else int(target)
        n_new = n_total - self._next_i
        if n_new <= 0:
            return
        values = np.full(n_new, float(current_ma))
        if current_ma > CURRENT_CLAMP_MA:
            self.clamped = True
        if self.noise_sigma > 0:
            values = values + self._rng.normal(0.0, self.noise_sigma, n_new)
        np.clip(values, 0.0, CURRENT_CLAMP_MA, out=values)
        self._append(self._next_i, values)
        self._next_i = n_total

    def _append(self, start_i: int, values: np.ndarray):
        self._chunks.append((start_i, values))
        self._buffered += len(values)
        while self._buffered > self.capacity:
            head_i, head = self._chunks[0]
            overflow = self._buffered - self.capacity
            drop = min(overflow, len(head))
            self._record_gap(head_i, head_i + drop - 1)
            if drop == len(head):
                self._chunks.popleft()
            else:
                self._chunks[0] = (head_i + drop, head[drop:])
            self._buffered -= drop
            self.lost += drop

    def _record_gap(self, first: int, last: int):
        if self.gaps and self.gaps[-1][1] == first - 1:
            self.gaps[-1] = (self.gaps[-1][0], last)
        else:
            self.gaps.append((first, last))

    # -- consumer --------------------------------------------------------------

    def read_arrays(self, max_n: int | None = None):
        """Consume up to max_n samples; returns (indices, currents) arrays."""
        if max_n is not None and max_n <= 0:
            return np.empty(0, dtype=np.int64), np.empty(0)
        idx_parts, cur_parts = [], []
        taken = 0
        while self._chunks and (max_n is None or taken < max_n):
            start_i, values = self._chunks[0]
            want = len(values) if max_n is None else min(len(values), max_n - taken)
            idx_parts.append(np.arange(start_i, start_i + want, dtype=np.int64))
            cur_parts.append(values[:want])
            taken += want
            if want == len(values):
                self._chunks.popleft()
            else:
                self._chunks[0] = (start_i + want, values[want:])
            self._buffered -= want
        if not idx_parts:
            return np.empty(0, dtype=np.int64), np.empty(0)
        idx = np.concatenate(idx_parts)
        self._read_cursor = int(idx[-1]) + 1
        return idx, np.concatenate(cur_parts)

    def read(self, max_n: int) -> list[PowerSample]:
        idx, cur = self.read_arrays(max_n)
        return [PowerSample(t=i / self.rate, current=float(c), voltage=self.voltage)
                for i, c in zip(idx.tolist(), cur.tolist())]

    # -- lifecycle -------------------------------------------------------------

    @property
    def delivered(self) -> int:
        return self._next_i - self.lost

    def close(self) -> TraceStats:
        self.closed = True
        return TraceStats(
            delivered=self.delivered,
            lost=self.lost,
            duration=float(self._elapsed),
            gaps=tuple(self.gaps),
        )

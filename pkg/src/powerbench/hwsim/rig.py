"""Simulated measurement rig: power meter, relay bank, and mains socket.

The control surface mirrors what a real-hardware backend would expose; all
state transitions are checked against the same safety rules a physical bench
would need (single Vout consumer, no sampling with the meter dark, socket
cut-off forces the meter dark).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from ..errors import (
    AlreadySampling,
    BadRate,
    MeterOff,
    NoLoad,
    NotSampling,
    RelayConflict,
    SamplingActive,
    SocketOff,
    VoltageOutOfRange,
)
from .sampling import SampleStream

VOLTAGE_MIN = 0.8
VOLTAGE_MAX = 13.5
MAX_RATE_HZ = 5000
CURRENT_CLAMP_MA = 6000.0

BATTERY = "BATTERY"
VOUT = "VOUT"

# Break-before-make relay transition: the device sees a short power gap.
RELAY_GAP_S = 0.001


@dataclass
class MeterState:
    powered: bool = False
    voltage: Optional[float] = None
    sampling: bool = False
    sample_rate: int = MAX_RATE_HZ


@dataclass
class SocketState:
    on: bool = False


@dataclass
class RigEvent:
    t: float
    device_id: str
    kind: str


@dataclass
class RigConfig:
    buffer_capacity: int = 65536
    noise_sigma_ma: float = 2.0


class MeasurementRig:
    """Socket + meter + relay bank for one vantage point."""

    def __init__(self, device_ids, config: RigConfig | None = None, clock=None):
        self.config = config or RigConfig()
        self.clock = clock
        self.socket = SocketState()
        self.meter = MeterState()
        self.relays = {d: BATTERY for d in device_ids}
        self.events: list[RigEvent] = []
        self._stream: Optional[SampleStream] = None
        self._load: Optional[Callable[[], float]] = None
        self._lock = threading.RLock()

    # -- queries ---------------------------------------------------------------

    @property
    def sampling(self) -> bool:
        return self.meter.sampling

    def vout_device(self) -> Optional[str]:
        for d, src in self.relays.items():
            if src == VOUT:
                return d
        return None

    def _log(self, device_id: str, kind: str):
        t = self.clock.now_s if self.clock is not None else 0.0
        self.events.append(RigEvent(t=t, device_id=device_id, kind=kind))

    # -- socket / meter --------------------------------------------------------

    def socket_set(self, on: bool) -> SocketState:
        with self._lock:
            if not on and self.meter.sampling:
                raise SamplingActive("socket off requested while sampling")
            self.socket.on = on
            if not on:
                self.meter.powered = False
                self.meter.voltage = None
            return self.socket

    def meter_power(self, on: bool) -> MeterState:
        with self._lock:
            if on and not self.socket.on:
                raise SocketOff("meter power-on requires the socket")
            if not on and self.meter.sampling:
                raise SamplingActive("meter off requested while sampling")
            self.meter.powered = on
            if not on:
                self.meter.voltage = None
            return self.meter

    def meter_set_voltage(self, volts: float) -> MeterState:
        with self._lock:
            if not self.socket.on:
                raise SocketOff("voltage set with socket off")
            if not (VOLTAGE_MIN <= volts <= VOLTAGE_MAX):
                raise VoltageOutOfRange(f"{volts} V outside [{VOLTAGE_MIN}, {VOLTAGE_MAX}]")
            self.meter.voltage = float(volts)
            return self.meter

    # -- relays ----------------------------------------------------------------

    def relay_switch(self, device_id: str, source: str) -> dict:
        with self._lock:
            if device_id not in self.relays:
                raise RelayConflict(f"unknown relay channel {device_id}")
            if source not in (BATTERY, VOUT):
                raise ValueError(f"bad relay source {source}")
            if self.relays[device_id] == source:
                return dict(self.relays)  # idempotent
            if source == VOUT:
                other = self.vout_device()
                if other is not None:
                    raise RelayConflict(f"{other} already on VOUT")
                if not self.meter.powered or self.meter.voltage is None:
                    raise MeterOff("VOUT switch requires powered meter with voltage set")
            self.relays[device_id] = source
            self._log(device_id, f"relay->{source} (gap {RELAY_GAP_S * 1000:.1f} ms)")
            return dict(self.relays)

    # -- sampling --------------------------------------------------------------

    def start_sampling(self, rate: int, load_ma: Callable[[], float],
                       seed: int = 0) -> SampleStream:
        with self._lock:
            if self._stream is not None:
                raise AlreadySampling()
            if rate <= 0 or rate > MAX_RATE_HZ:
                raise BadRate(f"rate {rate} outside (0, {MAX_RATE_HZ}]")
            if not self.meter.powered:
                raise MeterOff("start_sampling with meter unpowered")
            if self.vout_device() is None:
                raise NoLoad("no device on VOUT")
            stream = SampleStream(
                rate=rate,
                voltage=self.meter.voltage or 0.0,
                capacity=self.config.buffer_capacity,
                noise_sigma=self.config.noise_sigma_ma,
                seed=seed,
            )
            self._stream = stream
            self._load = load_ma
            self.meter.sampling = True
            self.meter.sample_rate = rate
            return stream

    def advance(self, dt: Fraction):
        """Advance the rig by one simulation step, emitting samples in bulk.

        Current is held piecewise-constant over the step (the step size is the
        device simulator's, well below any load dynamics of interest).
        """
        with self._lock:
            if self.clock is not None:
                self.clock.advance(dt)
            if self._stream is not None and self._load is not None:
                self._stream.emit_interval(self._load(), Fraction(dt))

    def stop_sampling(self):
        with self._lock:
            if self._stream is None:
                raise NotSampling()
            stats = self._stream.close()
            self._stream = None
            self._load = None
            self.meter.sampling = False
            return stats

    @property
    def stream(self) -> Optional[SampleStream]:
        return self._stream

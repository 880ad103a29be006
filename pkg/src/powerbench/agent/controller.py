"""Vantage-point controller: owns the rig and devices, dispatches API calls.

All hardware mutations go through one lock; the sample stream producer is
advanced by tick() and drained into trace files without blocking control
calls.
"""

from __future__ import annotations

import math
import threading
import uuid
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from ..clock import SimClock
from ..devicesim.commands import AutomationCommand
from ..devicesim.device import SimDevice
from ..errors import (
    Busy,
    ChannelInfeasible,
    MeterOff,
    NotSampling,
    RelayConflict,
    SamplingActive,
    UnknownDevice,
    VoltageOutOfRange,
)
from ..hwsim.rig import (
    BATTERY,
    VOLTAGE_MAX,
    VOLTAGE_MIN,
    VOUT,
    MeasurementRig,
    RigConfig,
)
from ..hwsim.tracefile import TraceMeta, TraceWriter
from .channels import USB, WIFI
from .config import AgentConfig
from .telemetry import ControllerTelemetry

STEP = Fraction(1, 30)        # device simulator step size
DRAIN_INTERVAL_S = 1.0        # trace-writer drain period


@dataclass
class MeasurementContext:
    device_id: str
    token: str
    rate: int
    duration_s: Optional[float]
    writer: TraceWriter
    started_at: Fraction
    last_drain: float = 0.0


class AgentController:
    def __init__(self, config: AgentConfig | None = None, clock: SimClock | None = None):
        self.config = config or AgentConfig()
        self.clock = clock or SimClock()
        self.specs = {d.device_id: d for d in self.config.devices}
        self.devices = {
            d.device_id: SimDevice(
                d.device_id,
                apps=self.config.apps,
                model=self.config.load_model,
                network=self.config.networks["default"],
            )
            for d in self.config.devices
        }
        rig_cfg = RigConfig(noise_sigma_ma=self.config.load_model.noise_sigma_ma)
        self.rig = MeasurementRig(list(self.specs), config=rig_cfg, clock=self.clock)
        self.usb_on = {d: True for d in self.specs}
        self.busy = {d: False for d in self.specs}
        self.active_channel = {d: WIFI for d in self.specs}
        self.telemetry = ControllerTelemetry()
        self.measurement: Optional[MeasurementContext] = None
        self._prepare_tokens: dict[str, str] = {}
        self._lock = threading.RLock()
        self._next_telemetry_t = 0.0
        self.tick_hooks: list = []   # called with sim time after every tick
        self.trace_dir = Path(self.config.workdir) / "traces"
        self.trace_dir.mkdir(parents=True, exist_ok=True)
        self.restore_safe_state()

    # -- helpers ---------------------------------------------------------------

    def _device(self, device_id: str) -> SimDevice:
        if device_id not in self.devices:
            raise UnknownDevice(device_id)
        return self.devices[device_id]

    def restore_safe_state(self):
        """Relays to BATTERY, socket dark, USB back on. Run before dispatches."""
        with self._lock:
            if self.measurement is not None:
                try:
                    self.stop_monitor()
                except NotSampling:
                    pass
            for d in self.specs:
                self.rig.relays[d] = BATTERY
            self.rig.meter.sampling = False
            self.rig.meter.powered = False
            self.rig.meter.voltage = None
            self.rig.socket.on = False
            for d in self.specs:
                self.usb_on[d] = True

    # -- public API (Table-style call surface) ---------------------------------

    def api_call(self, name: str, **args):
        with self._lock:
            if name == "list_devices":
                return sorted(self.specs)
            if name == "device_mirroring":
                dev = self._device(args["device_id"])
                dev.mirroring = not dev.mirroring
                return {"device_id": dev.device_id, "mirroring": dev.mirroring}
            if name == "power_monitor":
                if self.rig.meter.powered:
                    self.rig.meter_power(False)
                    self.rig.socket_set(False)
                else:
                    self.rig.socket_set(True)
                    self.rig.meter_power(True)
                return {"powered": self.rig.meter.powered}
            if name == "set_voltage":
                state = self.rig.meter_set_voltage(float(args["voltage"]))
                return {"voltage": state.voltage}
            if name == "start_monitor":
                return self.start_monitor(args["device_id"],
                                          float(args["duration"]),
                                          rate=int(args.get("rate", 5000)),
                                          seed=int(args.get("seed", 0)))
            if name == "stop_monitor":
                return self.stop_monitor()
            if name == "batt_switch":
                return self.batt_switch(args["device_id"])
            if name == "execute_adb":
                return self.execute_adb(args["device_id"], args["command"])
            raise ValueError(f"unknown api call {name}")

    def batt_switch(self, device_id: str):
        dev = self._device(device_id)
        source = VOUT if self.rig.relays[device_id] == BATTERY else BATTERY
        bank = self.rig.relay_switch(device_id, source)
        return {"device_id": dev.device_id, "source": bank[device_id]}

    def execute_adb(self, device_id: str, command):
        dev = self._device(device_id)
        if self.measurement is not None and self.active_channel.get(device_id) == USB:
            raise ChannelInfeasible("USB automation is forbidden during a measurement")
        cmd = command if isinstance(command, AutomationCommand) else AutomationCommand.from_dict(command)
        dev.apply_command(cmd)
        return {"ok": True, "cmd": cmd.kind}

    # -- measurement lifecycle -------------------------------------------------

    def prepare_measurement(self, device_id: str, voltage: float) -> str:
        """Safety sequence: USB off, socket on, meter on + voltage, relay VOUT."""
        with self._lock:
            dev = self._device(device_id)
            if not (VOLTAGE_MIN <= voltage <= VOLTAGE_MAX):
                raise VoltageOutOfRange(f"{voltage} V")
            if self.busy[device_id] or self.measurement is not None:
                raise Busy(device_id)
            other = self.rig.vout_device()
            if other is not None and other != device_id:
                raise RelayConflict(f"{other} already on VOUT")
            self.usb_on[device_id] = False
            self.rig.socket_set(True)
            self.rig.meter_power(True)
            self.rig.meter_set_voltage(voltage)
            self.rig.relay_switch(device_id, VOUT)
            if self.config.settle_delay_s > 0:
                self._run_clock(self.config.settle_delay_s)
            token = uuid.uuid4().hex
            self._prepare_tokens[token] = device_id
            return token

    def start_sampling(self, token: str, rate: int = 5000, seed: int = 0,
                       duration_s: float | None = None,
                       trace_name: str | None = None,
                       meta: TraceMeta | None = None):
        with self._lock:
            device_id = self._prepare_tokens.pop(token, None)
            if device_id is None:
                raise MeterOff("invalid or spent prepare token")
            dev = self.devices[device_id]
            stream = self.rig.start_sampling(rate, dev.current_ma, seed=seed)
            name = trace_name or f"{device_id}_{uuid.uuid4().hex[:8]}"
            trace_meta = meta or TraceMeta()
            trace_meta.device = device_id
            trace_meta.rate = rate
            trace_meta.voltage = self.rig.meter.voltage or 0.0
            trace_meta.seed = seed
            writer = TraceWriter(self.trace_dir / f"{name}.csv", trace_meta)
            self.measurement = MeasurementContext(
                device_id=device_id, token=token, rate=rate,
                duration_s=duration_s, writer=writer,
                started_at=self.clock.now,
            )
            self.busy[device_id] = True
            return stream

    def start_monitor(self, device_id: str, duration: float,
                      rate: int = 5000, seed: int = 0):
        """Toolbar-style start: meter must already be powered on."""
        if not self.rig.meter.powered:
            raise MeterOff("power the meter before start_monitor")
        if self.measurement is not None:
            raise Busy("measurement already active")
        self._device(device_id)
        token = self.prepare_measurement(device_id, self.specs[device_id].nominal_voltage)
        self.start_sampling(token, rate=rate, seed=seed, duration_s=duration)
        return {"device_id": device_id, "duration": duration, "rate": rate}

    def stop_monitor(self):
        with self._lock:
            if self.measurement is None:
                raise NotSampling()
            ctx = self.measurement
            stream = self.rig.stream
            self._drain()
            stats = self.rig.stop_sampling()
            # drain anything still buffered after close
            idx, cur = stream.read_arrays(None)
            ctx.writer.write_batch(idx, cur)
            ctx.writer.finalize(stats)
            self.measurement = None
            self.busy[ctx.device_id] = False
            return {"trace": str(ctx.writer.path), "delivered": stats.delivered,
                    "lost": stats.lost, "duration": stats.duration}

    def finalize_measurement(self, device_id: str):
        """Reverse sequence: relay to BATTERY, socket off, USB back on."""
        with self._lock:
            self._device(device_id)
            if self.measurement is not None and self.measurement.device_id == device_id:
                raise SamplingActive("stop the measurement first")
            self.rig.relay_switch(device_id, BATTERY)
            if self.rig.meter.powered:
                self.rig.meter_power(False)
            if self.rig.socket.on:
                self.rig.socket_set(False)
            self.usb_on[device_id] = True
            return {"device_id": device_id, "source": BATTERY}

    # -- time ------------------------------------------------------------------

    def tick(self, dt: Fraction = STEP):
        """Advance the whole vantage point by one step."""
        with self._lock:
            for dev in self.devices.values():
                dev.step(float(dt))
            self.rig.advance(dt)
            now = self.clock.now_s
            if now >= self._next_telemetry_t:
                mirroring = any(d.mirroring for d in self.devices.values())
                self.telemetry.record(now, sampling=self.rig.sampling, mirroring=mirroring)
                self._next_telemetry_t = math.floor(now) + self.telemetry.period_s
            ctx = self.measurement
            if ctx is not None:
                elapsed = float(self.clock.now - ctx.started_at)
                if elapsed - ctx.last_drain >= DRAIN_INTERVAL_S:
                    self._drain()
                if ctx.duration_s is not None and elapsed >= ctx.duration_s:
                    self.stop_monitor()
            for hook in self.tick_hooks:
                hook(now)

    def _run_clock(self, seconds: float):
        steps = int(round(seconds / float(STEP)))
        for _ in range(steps):
            self.tick(STEP)

    def run_for(self, seconds: float):
        self._run_clock(seconds)

    def _drain(self):
        ctx = self.measurement
        stream = self.rig.stream
        if ctx is None or stream is None:
            return
        idx, cur = stream.read_arrays(None)
        ctx.writer.write_batch(idx, cur)
        ctx.last_drain = float(self.clock.now - ctx.started_at)

    # -- health ----------------------------------------------------------------

    def healthcheck(self) -> dict:
        with self._lock:
            latest = self.telemetry.latest()
            if latest is None:
                latest = self.telemetry.record(self.clock.now_s,
                                               sampling=self.rig.sampling,
                                               mirroring=False)
            return {
                "cpu_pct": latest.cpu_pct,
                "mem_pct": latest.mem_pct,
                "net_up_bps": latest.net_up_bps,
                "devices_busy": dict(self.busy),
                "meter": {
                    "powered": self.rig.meter.powered,
                    "voltage": self.rig.meter.voltage,
                    "state": "SAMPLING" if self.rig.sampling else (
                        "ON" if self.rig.meter.powered else "OFF"),
                },
                "relays": dict(self.rig.relays),
            }

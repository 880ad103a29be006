"""Device-mirroring sessions: frame stream, input injection, latency probes."""

from __future__ import annotations

import uuid
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..agent.channels import BLUETOOTH
from ..agent.controller import AgentController
from ..analysis.stats import LatencyStats, latency_stats
from ..errors import (
    ChannelInfeasible,
    OutOfBounds,
    ProbeTimeout,
    SessionClosed,
    SessionExists,
    ToolbarHidden,
    UnknownDevice,
)

FRAME_RATE = 30.0
CLIENT_QUEUE_CAP = 256
SCREEN_W = 360
SCREEN_H = 640

# Frame transport budget: the encoder ceiling analog is 1 Mbps; above it the
# emitter degrades to keyframe-only mode (1 frame/s).
BANDWIDTH_CEILING_BPS = 1_000_000
DELTA_FRAME_BYTES = 4000
KEYFRAME_BYTES = 16000

TOOLBAR_ACTIONS = {
    "list_devices", "device_mirroring", "power_monitor", "set_voltage",
    "start_monitor", "stop_monitor", "batt_switch",
}


@dataclass(frozen=True)
class FrameEvent:
    seq: int
    t_emitted: float
    digest: int
    dirty: bool
    screen: dict
    current_ma: float = 0.0


@dataclass
class ChannelDelayModel:
    mean_s: float = 0.05
    std_s: float = 0.0
    seed: int = 0
    _rng: np.random.Generator = field(default=None, repr=False)

    def __post_init__(self):
        self._rng = np.random.default_rng(self.seed)

    def sample(self) -> float:
        if self.std_s <= 0:
            return max(self.mean_s, 0.0)
        return max(float(self._rng.normal(self.mean_s, self.std_s)), 0.0)


class Session:
    def __init__(self, controller: AgentController, device_id: str,
                 toolbar_enabled: bool = True,
                 delay_model: ChannelDelayModel | None = None,
                 frame_rate: float = FRAME_RATE):
        self.session_id = uuid.uuid4().hex[:12]
        self.controller = controller
        self.device_id = device_id
        self.device = controller.devices[device_id]
        self.toolbar_enabled = toolbar_enabled
        self.delay_model = delay_model or ChannelDelayModel()
        self.frame_rate = frame_rate
        self.open = True
        self.shared_with: set[str] = set()
        self.clients: dict[str, deque] = {}
        self.frame_seq = 0
        self._last_digest = self.device.framebuffer_digest()
        self.delta_frame_bytes = DELTA_FRAME_BYTES
        self.keyframe_bytes = KEYFRAME_BYTES
        self._next_frame_t = controller.clock.now_s
        self.input_log: list[tuple[float, dict]] = []
        self.frames: deque = deque(maxlen=4096)
        self._bw_window: deque = deque()  # (t, bytes)
        self.keyframe_only = False

    # -- frame emission (driven from the controller tick) ----------------------

    def on_tick(self, now: float):
        if not self.open:
            return
        period = 1.0 if self.keyframe_only else 1.0 / self.frame_rate
        while now >= self._next_frame_t - 1e-9:
            self._emit(self._next_frame_t)
            self._next_frame_t += period
            period = 1.0 if self.keyframe_only else 1.0 / self.frame_rate

    def _emit(self, t: float):
        digest = self.device.framebuffer_digest()
        dirty = digest != self._last_digest
        self._last_digest = digest
        self.frame_seq += 1
        event = FrameEvent(seq=self.frame_seq, t_emitted=t, digest=digest,
                           dirty=dirty, screen=self.device.screen_content(),
                           current_ma=self.device.current_ma())
        self.frames.append(event)
        self._account_bandwidth(t, self.keyframe_bytes if self.keyframe_only else
                                (self.delta_frame_bytes if dirty else 0))
        for client_id, queue in list(self.clients.items()):
            queue.append(event)
            if len(queue) > CLIENT_QUEUE_CAP:
                # A stalled client must never block the emitter: drop it.
                del self.clients[client_id]

    def _account_bandwidth(self, t: float, nbytes: int):
        self._bw_window.append((t, nbytes))
        while self._bw_window and self._bw_window[0][0] < t - 1.0:
            self._bw_window.popleft()
        bps = 8 * sum(b for _, b in self._bw_window)
        self.keyframe_only = bps > BANDWIDTH_CEILING_BPS

    # -- client API ------------------------------------------------------------

    def subscribe(self, client_id: str | None = None) -> str:
        if not self.open:
            raise SessionClosed(self.session_id)
        client_id = client_id or uuid.uuid4().hex[:8]
        self.clients[client_id] = deque()
        return client_id

    def next_frame(self, client_id: str, max_wait_s: float = 10.0) -> FrameEvent:
        """Advance the simulation until the client's next frame arrives."""
        if not self.open:
            raise SessionClosed(self.session_id)
        queue = self.clients.get(client_id)
        if queue is None:
            raise SessionClosed(f"client {client_id} not subscribed")
        deadline = self.controller.clock.now_s + max_wait_s
        while not queue:
            if self.controller.clock.now_s > deadline:
                raise ProbeTimeout("no frame emitted")
            self.controller.tick()
            if not self.open:
                raise SessionClosed(self.session_id)
        return queue.popleft()

    def inject(self, kind: str, x: int = 0, y: int = 0, code: str = "") -> dict:
        if not self.open:
            raise SessionClosed(self.session_id)
        if kind in ("tap", "scroll") and not (0 <= x < SCREEN_W and 0 <= y < SCREEN_H):
            raise OutOfBounds(f"({x}, {y})")
        t_server = self.controller.clock.now_s
        delay = self.delay_model.sample()
        t_applied = self.device.inject_input(kind, t_server, delay_s=delay)
        event = {"kind": kind, "x": x, "y": y, "code": code,
                 "t_server": t_server, "t_applied": t_applied}
        self.input_log.append((t_server, event))
        return {"ack": True, "t_server": t_server}

    def toolbar_action(self, action: str, **args):
        if not self.open:
            raise SessionClosed(self.session_id)
        if action not in TOOLBAR_ACTIONS:
            raise ValueError(f"unknown toolbar action {action}")
        if not self.toolbar_enabled:
            raise ToolbarHidden(action)
        return self.controller.api_call(action, **args)

    # -- latency probe ---------------------------------------------------------

    def probe_latency(self, n: int, timeout_s: float = 10.0) -> LatencyStats:
        if not self.open:
            raise SessionClosed(self.session_id)
        if n < 1:
            raise ValueError("n must be >= 1")
        client = self.subscribe()
        probes = []
        try:
            # Drain whatever is pending so each probe sees fresh frames.
            while self.clients[client]:
                self.clients[client].popleft()
            for _ in range(n):
                t_input = self.controller.clock.now_s
                self.inject("tap", x=SCREEN_W // 2, y=SCREEN_H // 2)
                deadline = t_input + timeout_s
                while True:
                    frame = self.next_frame(client, max_wait_s=timeout_s)
                    if frame.dirty and frame.t_emitted >= t_input:
                        probes.append((t_input, frame.t_emitted))
                        break
                    if self.controller.clock.now_s > deadline:
                        raise ProbeTimeout(f"no dirty frame within {timeout_s}s")
                # Let the tap overlay fade so the next probe starts static.
                self.controller.run_for(0.5)
                while self.clients[client]:
                    self.clients[client].popleft()
        finally:
            self.clients.pop(client, None)
        return latency_stats(probes)


class SessionManager:
    def __init__(self, controller: AgentController):
        self.controller = controller
        self.sessions: dict[str, Session] = {}
        controller_hooks = getattr(controller, "tick_hooks", None)
        if controller_hooks is not None:
            controller_hooks.append(self._on_tick)

    def _on_tick(self, now: float):
        for session in list(self.sessions.values()):
            session.on_tick(now)

    def _device_session(self, device_id: str) -> Session | None:
        for s in self.sessions.values():
            if s.device_id == device_id and s.open:
                return s
        return None

    def open_session(self, device_id: str, toolbar_enabled: bool = True,
                     delay_model: ChannelDelayModel | None = None) -> Session:
        if device_id not in self.controller.devices:
            raise UnknownDevice(device_id)
        if self._device_session(device_id) is not None:
            raise SessionExists(device_id)
        spec = self.controller.specs[device_id]
        if not spec.mirroring_capable:
            raise ChannelInfeasible("device cannot mirror")
        adb_channels = set(spec.supported_channels) - {BLUETOOTH}
        if not adb_channels or self.controller.active_channel[device_id] == BLUETOOTH:
            raise ChannelInfeasible("mirroring requires an ADB-capable channel")
        session = Session(self.controller, device_id,
                          toolbar_enabled=toolbar_enabled,
                          delay_model=delay_model)
        self.controller.devices[device_id].mirroring = True
        self.sessions[session.session_id] = session
        return session

    def close_session(self, session_id: str):
        session = self.sessions.get(session_id)
        if session is None or not session.open:
            raise SessionClosed(session_id)
        session.open = False
        self.controller.devices[session.device_id].mirroring = False

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise SessionClosed(session_id)
        return session

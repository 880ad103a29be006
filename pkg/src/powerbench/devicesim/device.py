"""Simulated mobile device: command interpreter and time evolution.

The device is stepped on a virtual clock by its owner (agent runner or
session emitter). CPU relaxes toward a target with a 2 s time constant;
frame_seq advances exactly when the declarative screen content changes.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInState, ScreenOff, UnknownApp
from .commands import AutomationCommand
from .loadmodel import LoadModel, instantaneous_current
from .profiles import (
    DEFAULT_NETWORK,
    AppProfile,
    NetworkProfile,
    effective_byte_scale,
    page_load_time,
)

HOME = "HOME"
IDLE_CPU_PCT = 2.0
CPU_TAU_S = 2.0
VIDEO_FPS = 30.0
INPUT_OVERLAY_S = 0.3   # visual ripple/scroll animation lifetime
SETUP_DURATION_S = 2.0  # first-launch setup (accept dialogs etc.)
SCROLL_ANIM_S = 0.5


@dataclass
class PendingInput:
    t_apply: float
    kind: str
    seq: int


class SimDevice:
    def __init__(self, device_id: str, apps: dict[str, AppProfile],
                 model: LoadModel | None = None,
                 network: NetworkProfile | None = None):
        self.device_id = device_id
        self.apps = apps
        self.model = model or LoadModel()
        self.network = network or DEFAULT_NETWORK
        self._input_seq = 0
        self.reset()

    # -- lifecycle -------------------------------------------------------------

    def reset(self, seed: int = 0, cpu_jitter_sigma: float = 0.0):
        self.t = 0.0
        self.current_app = HOME
        self.cpu_pct = IDLE_CPU_PCT
        self.screen_on = True
        self.mirroring = False
        self.frame_seq = 0
        self.pending: list[PendingInput] = []
        self.page_index = 0
        self.scroll_offset = 0
        self.video_until = 0.0
        self.video_start = 0.0
        self.transfer_until = 0.0
        self.setup_until = 0.0
        self.last_input_t = -math.inf
        self.bytes_transferred = 0
        self.needs_setup: set[str] = set()
        self._last_digest = None
        rng = np.random.default_rng(seed)
        self.cpu_jitter = float(rng.normal(0.0, cpu_jitter_sigma)) if cpu_jitter_sigma > 0 else 0.0
        self._last_digest = self.framebuffer_digest()

    # -- queries ---------------------------------------------------------------

    def _app_profile(self, app_id: str) -> AppProfile:
        try:
            return self.apps[app_id]
        except KeyError:
            raise UnknownApp(app_id) from None

    def cpu_target(self) -> float:
        if self.current_app == HOME:
            return IDLE_CPU_PCT
        app = self._app_profile(self.current_app)
        target = app.median_cpu_pct + self.cpu_jitter
        busy = (self.t < self.transfer_until or self.t < self.setup_until
                or self.t - self.last_input_t < SCROLL_ANIM_S)
        if busy:
            target += app.interaction_bump_pct
        return min(max(target, 0.0), 100.0)

    def screen_content(self) -> dict:
        """Declarative screen state; any change is one visible frame."""
        video_frame = 0
        if self.video_start < self.t <= self.video_until:
            video_frame = int((self.t - self.video_start) * VIDEO_FPS)
        return {
            "device": self.device_id,
            "screen_on": self.screen_on,
            "app": self.current_app,
            "page": self.page_index,
            "scroll": self.scroll_offset,
            "loading": self.t < self.transfer_until,
            "video_frame": video_frame,
            "overlay": self._input_seq if self.t - self.last_input_t < INPUT_OVERLAY_S else 0,
        }

    def framebuffer_digest(self) -> int:
        payload = repr(sorted(self.screen_content().items())).encode()
        return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")

    def current_ma(self) -> float:
        return instantaneous_current(self, self.model)

    # -- time evolution --------------------------------------------------------

    def step(self, dt: float):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.t += dt
        for ev in [p for p in self.pending if p.t_apply <= self.t]:
            self.pending.remove(ev)
            self._apply_input_effect(ev)
        target = self.cpu_target()
        self.cpu_pct += (target - self.cpu_pct) * (1.0 - math.exp(-dt / CPU_TAU_S))
        self.cpu_pct = min(max(self.cpu_pct, 0.0), 100.0)
        digest = self.framebuffer_digest()
        if digest != self._last_digest:
            self.frame_seq += 1
            self._last_digest = digest
        return self

    def _apply_input_effect(self, ev: PendingInput):
        self.last_input_t = self.t
        if ev.kind == "scroll":
            self.scroll_offset += 1

    # -- commands --------------------------------------------------------------

    def apply_command(self, cmd: AutomationCommand):
        kind, args = cmd.kind, cmd.args
        if kind == "launch_app":
            app = self._app_profile(args["app"])
            self.current_app = app.app_id
            self.screen_on = True
            if app.app_id in self.needs_setup:
                self.needs_setup.discard(app.app_id)
                self.setup_until = self.t + SETUP_DURATION_S
        elif kind == "clean_state":
            app = self._app_profile(args["app"])
            self.needs_setup.add(app.app_id)
            if self.current_app == app.app_id:
                self.current_app = HOME
                self.page_index = 0
                self.scroll_offset = 0
        elif kind == "load_url":
            if self.current_app == HOME:
                raise InvalidInState("load_url with no app in foreground")
            app = self._app_profile(self.current_app)
            if not app.is_browser:
                raise InvalidInState(f"{self.current_app} cannot load URLs")
            page_bytes = int(args.get("bytes", app.page_bytes))
            scale = effective_byte_scale(app, self.network)
            plt = page_load_time(self.network, page_bytes, byte_scale=scale)
            self.page_index += 1
            self.scroll_offset = 0
            self.transfer_until = self.t + plt
            self.bytes_transferred += int(page_bytes * scale)
        elif kind == "play_video":
            self.screen_on = True
            self.video_start = self.t
            self.video_until = self.t + float(args["duration"])
        elif kind == "scroll":
            for _ in range(int(args.get("count", 1))):
                self._input_seq += 1
                self._apply_input_effect(PendingInput(self.t, "scroll", self._input_seq))
        elif kind in ("tap", "key"):
            self._input_seq += 1
            self._apply_input_effect(PendingInput(self.t, kind, self._input_seq))
        elif kind == "wait":
            pass  # timing is the runner's job; a wait has no device effect
        else:
            raise ValueError(f"unhandled command {kind}")

    def inject_input(self, kind: str, t: float, delay_s: float = 0.0) -> float:
        """Schedule a remote input; returns the time it will hit the screen."""
        if not self.screen_on:
            raise ScreenOff(self.device_id)
        self._input_seq += 1
        t_applied = t + delay_s
        self.pending.append(PendingInput(t_apply=t_applied, kind=kind, seq=self._input_seq))
        return t_applied

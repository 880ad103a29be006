"""Coordinator domain records."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..agent.config import DeviceSpec
from ..errors import InvalidManifest
from ..hwsim.rig import VOLTAGE_MAX, VOLTAGE_MIN

QUEUED = "QUEUED"
RUNNING = "RUNNING"
DONE = "DONE"
FAILED = "FAILED"
CANCELLED = "CANCELLED"

LEGAL_TRANSITIONS = {
    (QUEUED, RUNNING), (RUNNING, DONE), (RUNNING, FAILED), (QUEUED, CANCELLED),
}

ONLINE = "ONLINE"
OFFLINE = "OFFLINE"

_VP_ID_RE = re.compile(r"^[a-z0-9]([a-z0-9-]{0,61}[a-z0-9])?$")


def validate_vp_id(vp_id: str) -> str:
    if not _VP_ID_RE.match(vp_id or ""):
        raise ValueError(f"vp_id {vp_id!r} is not a DNS-safe label")
    return vp_id


@dataclass
class VantagePointRecord:
    vp_id: str
    endpoint: str
    allowlisted_ips: list
    devices: list            # DeviceSpec
    meter: dict = field(default_factory=lambda: {
        "voltage_min": VOLTAGE_MIN, "voltage_max": VOLTAGE_MAX, "max_rate_hz": 5000,
    })
    last_heartbeat: float = 0.0
    cpu_pct: float = 0.0
    busy: dict = field(default_factory=dict)   # device_id -> bool

    def status(self, now: float, heartbeat_interval: float) -> str:
        return OFFLINE if now - self.last_heartbeat > 3 * heartbeat_interval else ONLINE

    def to_dict(self) -> dict:
        return {
            "vp_id": self.vp_id, "endpoint": self.endpoint,
            "allowlisted_ips": list(self.allowlisted_ips),
            "devices": [d.to_dict() for d in self.devices],
            "meter": dict(self.meter), "last_heartbeat": self.last_heartbeat,
            "cpu_pct": self.cpu_pct, "busy": dict(self.busy),
        }


def validate_manifest(manifest: dict, meter: dict | None = None) -> dict:
    """Check JobManifest invariants; raises InvalidManifest with the field name."""
    if not isinstance(manifest, dict):
        raise InvalidManifest("manifest", "not an object")
    if not manifest.get("experimenter"):
        raise InvalidManifest("experimenter", "missing")
    if float(manifest.get("duration_s", 0)) <= 0:
        raise InvalidManifest("duration_s", "must be > 0")
    if int(manifest.get("repetitions", 1)) < 1:
        raise InvalidManifest("repetitions", "must be >= 1")
    voltage = manifest.get("voltage")
    if voltage is None:
        raise InvalidManifest("voltage", "missing")
    vmin = (meter or {}).get("voltage_min", VOLTAGE_MIN)
    vmax = (meter or {}).get("voltage_max", VOLTAGE_MAX)
    if not (vmin <= float(voltage) <= vmax):
        raise InvalidManifest("voltage", f"outside [{vmin}, {vmax}]")
    constraints = manifest.get("constraints", {})
    if constraints.get("connectivity", "WIFI") not in ("WIFI", "CELLULAR"):
        raise InvalidManifest("constraints.connectivity")
    gate = constraints.get("cpu_gate_pct")
    if gate is not None and not (0 <= float(gate) <= 100):
        raise InvalidManifest("constraints.cpu_gate_pct")
    return manifest


@dataclass
class JobRecord:
    job_id: int
    manifest: dict
    status: str = QUEUED
    assigned: tuple | None = None      # (vp_id, device_id)
    completed_at: float | None = None
    retention_deadline: float | None = None
    failure_reason: str = ""
    dispatched_at: float | None = None

    @property
    def owner(self) -> str:
        return self.manifest.get("experimenter", "")

    def transition(self, new_status: str):
        from ..errors import IllegalTransition
        if (self.status, new_status) not in LEGAL_TRANSITIONS:
            raise IllegalTransition(f"{self.status} -> {new_status}")
        self.status = new_status

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id, "manifest": self.manifest, "status": self.status,
            "assigned": list(self.assigned) if self.assigned else None,
            "completed_at": self.completed_at,
            "retention_deadline": self.retention_deadline,
            "failure_reason": self.failure_reason,
            "dispatched_at": self.dispatched_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JobRecord":
        d = dict(d)
        if d.get("assigned"):
            d["assigned"] = tuple(d["assigned"])
        return cls(**d)

"""Pure dispatch scheduling over a fleet snapshot.

One job per device, FIFO by job id, optional controller CPU gate. Given the
same queue and snapshot the result is identical; ties cannot occur because
job ids are unique and devices are claimed in id order.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..agent.channels import ChannelRequirements, feasible_channels
from ..agent.config import DeviceSpec
from .types import ONLINE


@dataclass(frozen=True)
class Dispatch:
    job_id: int
    vp_id: str
    device_id: str


def device_matches(spec: DeviceSpec, vp_id: str, manifest: dict) -> bool:
    c = manifest.get("constraints", {})
    if c.get("device_id") and spec.device_id != c["device_id"]:
        return False
    if c.get("model") and spec.model != c["model"]:
        return False
    if c.get("vp_id") and vp_id != c["vp_id"]:
        return False
    mirroring = bool(manifest.get("mirroring", False))
    if mirroring and not spec.mirroring_capable:
        return False
    if manifest.get("preloaded", False) and not mirroring:
        return True
    req = ChannelRequirements(
        connectivity=c.get("connectivity", "WIFI"),
        adb_required=bool(manifest.get("adb_required", False)) or mirroring,
        mirroring=mirroring,
        device_rooted=spec.rooted,
    )
    return any(mode in spec.supported_channels for mode in feasible_channels(req))


def schedule(queued_jobs, fleet: dict, now: float = 0.0,
             heartbeat_interval: float = 10.0) -> list[Dispatch]:
    """queued_jobs: JobRecord iterable (any order); fleet: vp_id -> snapshot.

    Snapshot per vantage point: {"record": VantagePointRecord-like with
    .devices/.busy/.cpu_pct, "status": ONLINE|OFFLINE} or a
    VantagePointRecord directly (status derived from heartbeats).
    """
    claimed: set[tuple[str, str]] = set()
    dispatches: list[Dispatch] = []
    for job in sorted(queued_jobs, key=lambda j: j.job_id):
        gate = job.manifest.get("constraints", {}).get("cpu_gate_pct")
        placed = None
        for vp_id in sorted(fleet):
            vp = fleet[vp_id]
            record = vp.get("record") if isinstance(vp, dict) else vp
            status = (vp.get("status") if isinstance(vp, dict) else None) or \
                record.status(now, heartbeat_interval)
            if status != ONLINE:
                continue
            if gate is not None and record.cpu_pct > float(gate):
                continue
            for spec in record.devices:
                key = (vp_id, spec.device_id)
                if key in claimed or record.busy.get(spec.device_id, False):
                    continue
                if device_matches(spec, vp_id, job.manifest):
                    placed = key
                    break
            if placed:
                break
        if placed:
            claimed.add(placed)
            dispatches.append(Dispatch(job.job_id, placed[0], placed[1]))
    return dispatches

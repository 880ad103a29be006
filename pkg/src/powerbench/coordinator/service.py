"""Coordinator core: registration, job queue, dispatch, artifacts.

All mutations are serialized behind one lock; handlers (TCP, HTTP) call into
this object and always observe a consistent snapshot.
"""

from __future__ import annotations

import threading
import time as _time
from pathlib import Path

from ..agent.config import DeviceSpec
from ..errors import (
    DuplicateId,
    Expired,
    IllegalTransition,
    NotReady,
    NoMatchingDevice,
    Unauthorized,
    UnknownJob,
)
from .roles import (
    ADMIN,
    CANCEL,
    FETCH,
    REGISTER_VP,
    SUBMIT,
    VIEW,
    Principal,
    TokenRegistry,
    authorize,
)
from .scheduler import Dispatch, device_matches, schedule
from .store import JobStore
from .types import (
    CANCELLED,
    DONE,
    FAILED,
    OFFLINE,
    ONLINE,
    QUEUED,
    RUNNING,
    JobRecord,
    VantagePointRecord,
    validate_manifest,
    validate_vp_id,
)

DEFAULT_RETENTION_S = 7 * 24 * 3600.0
HEARTBEAT_INTERVAL_S = 10.0
OFFLINE_JOB_GRACE_S = 60.0


class Coordinator:
    def __init__(self, storage_dir: Path, tokens: TokenRegistry | None = None,
                 retention_s: float = DEFAULT_RETENTION_S,
                 heartbeat_interval_s: float = HEARTBEAT_INTERVAL_S,
                 time_fn=_time.monotonic):
        self.store = JobStore(Path(storage_dir))
        self.tokens = tokens or TokenRegistry()
        self.retention_s = retention_s
        self.heartbeat_interval_s = heartbeat_interval_s
        self.time_fn = time_fn
        self.vps: dict[str, VantagePointRecord] = {}
        self._lock = threading.RLock()
        self._recover_running_jobs()

    def _recover_running_jobs(self):
        # A restart severs agent connections; anything RUNNING is an orphan.
        for record in self.store.jobs.values():
            if record.status == RUNNING:
                record.dispatched_at = None  # grace period restarts on reconnect

    def _principal(self, token: str) -> Principal | None:
        return self.tokens.resolve(token)

    # -- vantage points --------------------------------------------------------

    def register_vantage_point(self, manifest: dict, token: str,
                               source_ip: str | None = None,
                               handshake_ok: bool = True) -> str:
        with self._lock:
            principal = self._principal(token)
            if not authorize(principal, REGISTER_VP):
                raise Unauthorized("REGISTER_VP requires ADMIN")
            vp_id = validate_vp_id(manifest["vp_id"])
            if vp_id in self.vps:
                raise DuplicateId(vp_id)
            allowlist = list(manifest.get("allowlisted_ips", []))
            if source_ip is not None and allowlist and source_ip not in allowlist:
                raise Unauthorized(f"{source_ip} not on allowlist")
            if not handshake_ok:
                from ..errors import Unreachable
                raise Unreachable(manifest.get("endpoint", ""))
            record = VantagePointRecord(
                vp_id=vp_id,
                endpoint=manifest.get("endpoint", ""),
                allowlisted_ips=allowlist,
                devices=[DeviceSpec.from_dict(d) for d in manifest.get("devices", [])],
                last_heartbeat=self.time_fn(),
            )
            self.vps[vp_id] = record
            return vp_id

    def heartbeat(self, vp_id: str, health: dict | None = None):
        with self._lock:
            record = self.vps.get(vp_id)
            if record is None:
                return
            record.last_heartbeat = self.time_fn()
            if health:
                record.cpu_pct = float(health.get("cpu_pct", record.cpu_pct))
                record.busy = dict(health.get("devices_busy", record.busy))

    def vp_status(self, vp_id: str) -> str:
        record = self.vps[vp_id]
        return record.status(self.time_fn(), self.heartbeat_interval_s)

    def list_devices(self) -> list[dict]:
        with self._lock:
            out = []
            for vp_id in sorted(self.vps):
                record = self.vps[vp_id]
                for spec in record.devices:
                    out.append({
                        "vp_id": vp_id, **spec.to_dict(),
                        "busy": record.busy.get(spec.device_id, False),
                        "vp_status": self.vp_status(vp_id),
                    })
            return out

    # -- jobs ------------------------------------------------------------------

    def submit_job(self, manifest: dict, token: str) -> int:
        with self._lock:
            principal = self._principal(token)
            if not authorize(principal, SUBMIT):
                raise Unauthorized("SUBMIT denied")
            validate_manifest(manifest)
            manifest = dict(manifest)
            manifest["experimenter"] = principal.principal_id
            if not any(device_matches(spec, vp_id, manifest)
                       for vp_id, rec in self.vps.items() for spec in rec.devices):
                raise NoMatchingDevice()
            record = JobRecord(job_id=self.store.next_job_id(), manifest=manifest)
            self.store.append(record)
            return record.job_id

    def get_job(self, job_id: int, token: str | None = None) -> JobRecord:
        with self._lock:
            record = self.store.jobs.get(job_id)
            if record is None:
                raise UnknownJob(str(job_id))
            if token is not None and not authorize(self._principal(token), VIEW, record):
                raise Unauthorized("VIEW denied")
            return record

    def cancel_job(self, job_id: int, token: str):
        with self._lock:
            record = self.store.jobs.get(job_id)
            if record is None:
                raise UnknownJob(str(job_id))
            if not authorize(self._principal(token), CANCEL, record):
                raise Unauthorized("CANCEL denied")
            record.transition(CANCELLED)
            self.store.append(record)

    def queued_jobs(self) -> list[JobRecord]:
        return [r for r in self.store.jobs.values() if r.status == QUEUED]

    def schedule_tick(self, fleet: dict | None = None) -> list[Dispatch]:
        """Compute dispatches and mark the jobs RUNNING."""
        with self._lock:
            now = self.time_fn()
            if fleet is None:
                fleet = {vp_id: rec for vp_id, rec in self.vps.items()}
            dispatches = schedule(self.queued_jobs(), fleet, now=now,
                                  heartbeat_interval=self.heartbeat_interval_s)
            for d in dispatches:
                record = self.store.jobs[d.job_id]
                record.transition(RUNNING)
                record.assigned = (d.vp_id, d.device_id)
                record.dispatched_at = now
                self.store.append(record)
                vp = self.vps.get(d.vp_id)
                if vp is not None:
                    vp.busy[d.device_id] = True
            return dispatches

    def report_status(self, job_id: int, status: str, agent_vp: str | None = None,
                      artifacts: dict | None = None, failure_reason: str = ""):
        with self._lock:
            record = self.store.jobs.get(job_id)
            if record is None:
                raise UnknownJob(str(job_id))
            if agent_vp is not None:
                assigned_vp = record.assigned[0] if record.assigned else None
                if assigned_vp != agent_vp:
                    raise Unauthorized(f"{agent_vp} is not assigned to job {job_id}")
            record.transition(status)
            if status in (DONE, FAILED):
                now = self.time_fn()
                record.completed_at = now
                record.retention_deadline = now + self.retention_s
                record.failure_reason = failure_reason
                if artifacts:
                    self.store.store_artifacts(job_id, artifacts)
                vp = self.vps.get(record.assigned[0]) if record.assigned else None
                if vp is not None and record.assigned:
                    vp.busy[record.assigned[1]] = False
            self.store.append(record)

    def fetch_artifacts(self, job_id: int, token: str) -> dict[str, bytes]:
        with self._lock:
            record = self.store.jobs.get(job_id)
            if record is None:
                raise UnknownJob(str(job_id))
            if not authorize(self._principal(token), FETCH, record):
                raise Unauthorized("FETCH denied")
            if record.status not in (DONE, FAILED):
                raise NotReady(record.status)
            if record.retention_deadline is not None and \
                    self.time_fn() > record.retention_deadline:
                raise Expired(str(job_id))
            return self.store.load_artifacts(job_id)

    # -- failure policy --------------------------------------------------------

    def expire_offline_jobs(self):
        """Fail RUNNING jobs whose vantage point has been OFFLINE past grace."""
        with self._lock:
            now = self.time_fn()
            for record in list(self.store.jobs.values()):
                if record.status != RUNNING or not record.assigned:
                    continue
                vp = self.vps.get(record.assigned[0])
                if vp is None:
                    continue
                offline = vp.status(now, self.heartbeat_interval_s) == OFFLINE
                if offline and now - vp.last_heartbeat > 3 * self.heartbeat_interval_s + OFFLINE_JOB_GRACE_S:
                    self.report_status(record.job_id, FAILED,
                                      failure_reason="vantage point offline")

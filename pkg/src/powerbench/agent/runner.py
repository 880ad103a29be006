"""End-to-end job execution on the vantage point."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..analysis import Trace, summarize_trace
from ..devicesim.commands import AutomationCommand, parse_script
from ..errors import ChannelInfeasible, NotSampling, PowerbenchError
from ..hwsim.tracefile import TraceMeta
from .channels import ChannelRequirements, feasible_channels, select_channel
from .controller import AgentController

DONE = "DONE"
FAILED = "FAILED"


@dataclass
class ExecutionRecord:
    job_id: int
    outcome: str
    reason: str = ""
    traces: list = field(default_factory=list)       # trace csv paths
    summaries: list = field(default_factory=list)    # per-repetition dicts
    telemetry: list = field(default_factory=list)    # TelemetrySample list
    bundle_dir: str = ""

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id, "outcome": self.outcome, "reason": self.reason,
            "traces": [str(t) for t in self.traces],
            "summaries": self.summaries,
            "telemetry": [
                {"t": s.t, "cpu_pct": s.cpu_pct, "mem_pct": s.mem_pct,
                 "net_up_bps": s.net_up_bps} for s in self.telemetry
            ],
            "bundle_dir": self.bundle_dir,
        }


def pick_device(controller: AgentController, constraints: dict) -> str | None:
    """First registered device matching the job constraints."""
    want_id = constraints.get("device_id")
    want_model = constraints.get("model")
    for device_id in sorted(controller.specs):
        spec = controller.specs[device_id]
        if want_id and device_id != want_id:
            continue
        if want_model and spec.model != want_model:
            continue
        return device_id
    return None


def channel_for_job(controller: AgentController, device_id: str, manifest: dict) -> str:
    spec = controller.specs[device_id]
    mirroring = bool(manifest.get("mirroring", False))
    if manifest.get("preloaded", False) and not mirroring:
        # Preloaded UI-test scripts need no live channel during measurement.
        return "NONE"
    req = ChannelRequirements(
        connectivity=manifest.get("constraints", {}).get("connectivity", "WIFI"),
        adb_required=bool(manifest.get("adb_required", False)) or mirroring,
        mirroring=mirroring,
        device_rooted=spec.rooted,
    )
    for mode in feasible_channels(req):
        if mode in spec.supported_channels:
            return mode
    # Re-raise with the matrix's reason.
    select_channel(ChannelRequirements(req.connectivity, req.adb_required,
                                       req.mirroring, req.device_rooted))
    raise ChannelInfeasible("device supports no feasible channel")


def handle_dispatch(controller: AgentController, job_id: int, manifest: dict) -> ExecutionRecord:
    """Run all repetitions of a dispatched job, always restoring safe state."""
    record = ExecutionRecord(job_id=job_id, outcome=DONE)
    telemetry_start = len(controller.telemetry.samples)
    constraints = manifest.get("constraints", {})
    device_id = pick_device(controller, constraints)
    if device_id is None:
        record.outcome = FAILED
        record.reason = "NoMatchingDevice"
        return record
    device = controller.devices[device_id]
    try:
        channel = channel_for_job(controller, device_id, manifest)
        if manifest.get("mirroring") and not controller.specs[device_id].mirroring_capable:
            raise ChannelInfeasible("device cannot mirror (needs Android API >= 21)")
        controller.active_channel[device_id] = channel if channel != "NONE" else "WIFI"
        script = parse_script(manifest.get("script", []))
        voltage = float(manifest.get("voltage", controller.specs[device_id].nominal_voltage))
        duration_s = float(manifest["duration_s"])
        repetitions = int(manifest.get("repetitions", 1))
        rate = int(manifest.get("sample_rate_hz", 5000))
        base_seed = int(manifest.get("seed", job_id * 1000))
        jitter = float(manifest.get("cpu_jitter_sigma", 0.0))
        profile_name = constraints.get("network_profile") or "default"
        network = controller.config.networks[profile_name]

        for rep in range(repetitions):
            rep_seed = base_seed + rep
            device.reset(seed=rep_seed, cpu_jitter_sigma=jitter)
            device.network = network
            # State cleaning happens over USB before the meter takes over.
            pending = list(script)
            while pending and pending[0].kind == "clean_state":
                device.apply_command(pending.pop(0))
            token = controller.prepare_measurement(device_id, voltage)
            device.mirroring = bool(manifest.get("mirroring", False))
            meta = TraceMeta(job_id=job_id, repetition=rep)
            controller.start_sampling(
                token, rate=rate, seed=rep_seed,
                trace_name=f"job{job_id}_rep{rep}", meta=meta,
            )
            elapsed = 0.0
            for cmd in pending:
                if cmd.kind == "wait":
                    step_s = float(cmd.args["s"])
                    budget = max(0.0, min(step_s, duration_s - elapsed))
                    if budget > 0:
                        controller.run_for(budget)
                    elapsed += step_s
                else:
                    device.apply_command(cmd)
            if elapsed < duration_s:
                controller.run_for(duration_s - elapsed)
            result = controller.stop_monitor()
            device.mirroring = False
            controller.finalize_measurement(device_id)
            trace_path = Path(result["trace"])
            record.traces.append(trace_path)
            summary = summarize_trace(Trace.from_file(trace_path)).to_dict()
            summary["repetition"] = rep
            record.summaries.append(summary)
    except PowerbenchError as err:
        record.outcome = FAILED
        record.reason = err.code
        _cleanup(controller, device_id)
    except Exception as err:  # defensive: never leave hardware unsafe
        record.outcome = FAILED
        record.reason = repr(err)
        _cleanup(controller, device_id)
    finally:
        device.mirroring = False
    record.telemetry = controller.telemetry.samples[telemetry_start:]
    if record.outcome == DONE:
        record.bundle_dir = str(write_bundle(controller, record, manifest))
    return record


def _cleanup(controller: AgentController, device_id: str):
    try:
        controller.stop_monitor()
    except NotSampling:
        pass
    try:
        controller.finalize_measurement(device_id)
    except PowerbenchError:
        controller.restore_safe_state()


def write_bundle(controller: AgentController, record: ExecutionRecord,
                 manifest: dict) -> Path:
    """Artifact bundle: traces + sidecars, summary.json, device log."""
    bundle = Path(controller.config.workdir) / "bundles" / f"job{record.job_id}"
    bundle.mkdir(parents=True, exist_ok=True)
    for trace in record.traces:
        for p in (Path(trace), Path(trace).with_suffix(".meta.json")):
            if p.exists():
                (bundle / p.name).write_bytes(p.read_bytes())
    (bundle / "summary.json").write_text(json.dumps({
        "job_id": record.job_id,
        "manifest": manifest,
        "repetitions": record.summaries,
        "telemetry": record.to_dict()["telemetry"],
    }, indent=2) + "\n")
    events = [f"{e.t:.3f} {e.device_id} {e.kind}" for e in controller.rig.events]
    (bundle / "device.log").write_text("\n".join(events) + "\n")
    return bundle

"""Experimenter command-line client for the coordinator.

Subcommands: devices, submit, status, artifacts, scenario run, report.
Exit codes: 0 success, 1 remote/domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import base64
import json
import os
import sys
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import Trace, compare_groups, summarize_runs
from .analysis.report import write_cdf_dat, write_group_bars_dat, write_json_report
from .scenarios import SCENARIO_DIR, expand_jobs, load_scenario

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

POLL_INTERVAL_S = 1.0
CONFIG_PATH = Path.home() / ".powerbench.toml"


class RemoteError(Exception):
    def __init__(self, code: str, detail: str = ""):
        super().__init__(code)
        self.code = code
        self.detail = detail


@dataclass
class CliConfig:
    endpoint: str
    token: str
    output: str = "text"

    def __post_init__(self):
        if not self.endpoint:
            raise ValueError("coordinator endpoint must be nonempty")


def load_config(args) -> CliConfig:
    """Precedence: flags > env (BL_COORDINATOR, BL_TOKEN) > ~/.powerbench.toml."""
    endpoint = token = ""
    if CONFIG_PATH.exists():
        doc = tomllib.loads(CONFIG_PATH.read_text()).get("client", {})
        endpoint = doc.get("endpoint", "")
        token = doc.get("token", "")
    endpoint = os.environ.get("BL_COORDINATOR", endpoint)
    token = os.environ.get("BL_TOKEN", token)
    if getattr(args, "coordinator", None):
        endpoint = args.coordinator
    if getattr(args, "token", None):
        token = args.token
    return CliConfig(endpoint=endpoint.rstrip("/"), token=token,
                     output=getattr(args, "output", "text"))


def request(cfg: CliConfig, method: str, path: str, payload: dict | None = None) -> dict:
    body = json.dumps(payload).encode() if payload is not None else None
    req = urllib.request.Request(
        cfg.endpoint + path, data=body, method=method,
        headers={"Authorization": f"Bearer {cfg.token}",
                 "Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return json.loads(resp.read())
    except urllib.error.HTTPError as err:
        try:
            doc = json.loads(err.read())
        except (ValueError, OSError):
            doc = {"error": f"HTTP{err.code}"}
        raise RemoteError(doc.get("error", f"HTTP{err.code}"),
                          doc.get("detail", "")) from None
    except urllib.error.URLError as err:
        raise RemoteError("Unreachable", str(err.reason)) from None


def emit(cfg: CliConfig, document: dict, text: str):
    """json mode: exactly one document on stdout; text mode: human lines."""
    if cfg.output == "json":
        print(json.dumps(document, indent=2, sort_keys=True))
    elif text:
        print(text)


# -- subcommands ---------------------------------------------------------------

def cmd_devices(cfg: CliConfig, args) -> int:
    doc = request(cfg, "GET", "/devices")
    lines = []
    for dev in doc["devices"]:
        state = "busy" if dev.get("busy") else "idle"
        if dev.get("vp_status") == "OFFLINE":
            state = "offline"
        lines.append(f"{dev['vp_id']}/{dev['device_id']} {dev['os']} {state}")
    emit(cfg, doc, "\n".join(lines))
    return 0


def cmd_submit(cfg: CliConfig, args) -> int:
    path = Path(args.manifest)
    if not path.exists():
        print(f"manifest not found: {path}", file=sys.stderr)
        return 2
    try:
        manifest = json.loads(path.read_text())
    except ValueError as err:
        print(f"bad manifest JSON: {err}", file=sys.stderr)
        return 2
    if args.repetitions is not None:
        manifest["repetitions"] = args.repetitions
    if args.mirroring is not None:
        manifest["mirroring"] = args.mirroring == "on"
    if args.profile is not None:
        manifest.setdefault("constraints", {})["network_profile"] = args.profile
    doc = request(cfg, "POST", "/jobs", manifest)
    emit(cfg, doc, f"job {doc['job_id']} submitted")
    return 0


def cmd_status(cfg: CliConfig, args) -> int:
    doc = request(cfg, "GET", f"/jobs/{args.job}")
    emit(cfg, doc, f"job {doc['job_id']} {doc['status']}")
    return 0


def _fetch_artifacts(cfg: CliConfig, job_id: int, out_dir: Path) -> list[Path]:
    doc = request(cfg, "GET", f"/jobs/{job_id}/artifacts")
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, b64 in sorted(doc["files"].items()):
        target = out_dir / name
        target.write_bytes(base64.b64decode(b64))
        written.append(target)
    return written


def cmd_artifacts(cfg: CliConfig, args) -> int:
    written = _fetch_artifacts(cfg, args.job, Path(args.out))
    emit(cfg, {"job_id": args.job, "files": [str(p) for p in written]},
         "\n".join(str(p) for p in written))
    return 0


def _job_traces(job_dir: Path) -> list[Trace]:
    return [Trace.from_file(p) for p in sorted(job_dir.glob("*.csv"))]


def _write_report(out_dir: Path, groups: dict) -> dict:
    """groups: label -> list of traces. Emits report.json plus .dat plot files."""
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries = {g: summarize_runs(tr) for g, tr in groups.items()}
    payload = {"groups": {g: s.to_dict() for g, s in summaries.items()}}
    if len(summaries) >= 2:
        report = compare_groups(summaries)
        payload["comparison"] = report.to_dict()
        write_group_bars_dat(out_dir / "groups.dat", report)
    for label, traces in groups.items():
        if traces:
            write_cdf_dat(out_dir / f"cdf_{label}.dat",
                          np.concatenate([t.current_ma for t in traces]))
    write_json_report(out_dir / "report.json", payload)
    return payload


def cmd_report(cfg: CliConfig, args) -> int:
    out_dir = Path(args.out)
    groups = {}
    for job_id in args.jobs:
        job_dir = out_dir / f"job{job_id}"
        _fetch_artifacts(cfg, job_id, job_dir)
        groups[f"job{job_id}"] = _job_traces(job_dir)
    payload = _write_report(out_dir, groups)
    order = payload.get("comparison", {}).get("order", list(groups))
    emit(cfg, payload, "\n".join(
        f"{g} mean {payload['groups'][g]['mean']:.4f} mAh "
        f"std {payload['groups'][g]['std']:.4f}" for g in order))
    return 0


def cmd_scenario_run(cfg: CliConfig, args) -> int:
    scenario = load_scenario(args.name, Path(args.scenario_dir) if args.scenario_dir
                             else SCENARIO_DIR)
    jobs = {}
    for label, manifest in expand_jobs(scenario):
        doc = request(cfg, "POST", "/jobs", manifest)
        jobs[label] = doc["job_id"]
        print(f"submitted {label} as job {doc['job_id']}", file=sys.stderr)
    pending = dict(jobs)
    while pending:
        time.sleep(POLL_INTERVAL_S)
        for label, job_id in list(pending.items()):
            doc = request(cfg, "GET", f"/jobs/{job_id}")
            if doc["status"] in ("DONE", "FAILED", "CANCELLED"):
                if doc["status"] != "DONE":
                    raise RemoteError("JobFailed", f"{label}: {doc['status']}")
                del pending[label]
    out_dir = Path(args.out)
    groups = {}
    for label, job_id in jobs.items():
        job_dir = out_dir / f"job{job_id}"
        _fetch_artifacts(cfg, job_id, job_dir)
        groups[label] = _job_traces(job_dir)
    payload = _write_report(out_dir, groups)
    payload["jobs"] = jobs
    order = payload.get("comparison", {}).get("order", list(groups))
    emit(cfg, payload, "\n".join(
        f"{g} mean {payload['groups'][g]['mean']:.4f} mAh "
        f"std {payload['groups'][g]['std']:.4f}" for g in order))
    return 0


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powerbench",
                                     description="coordinator command-line client")
    parser.add_argument("--coordinator", help="coordinator endpoint URL")
    parser.add_argument("--token", help="API token")
    parser.add_argument("--output", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("devices", help="list fleet devices")

    p = sub.add_parser("submit", help="submit a job manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--repetitions", type=int)
    p.add_argument("--mirroring", choices=("on", "off"))
    p.add_argument("--profile", help="network profile name")

    p = sub.add_parser("status", help="show job status")
    p.add_argument("job", type=int)

    p = sub.add_parser("artifacts", help="download job artifacts")
    p.add_argument("job", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("scenario", help="run a scenario suite")
    scen_sub = p.add_subparsers(dest="scenario_command", required=True)
    p = scen_sub.add_parser("run")
    p.add_argument("name")
    p.add_argument("--out", default="scenario-out")
    p.add_argument("--scenario-dir")

    p = sub.add_parser("report", help="analyze finished jobs")
    p.add_argument("jobs", type=int, nargs="+")
    p.add_argument("--out", default="report-out")
    return parser


COMMANDS = {
    "devices": cmd_devices,
    "submit": cmd_submit,
    "status": cmd_status,
    "artifacts": cmd_artifacts,
    "report": cmd_report,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        cfg = load_config(args)
    except ValueError as err:
        print(str(err), file=sys.stderr)
        return 2
    try:
        if args.command == "scenario":
            return cmd_scenario_run(cfg, args)
        return COMMANDS[args.command](cfg, args)
    except RemoteError as err:
        detail = f": {err.detail}" if err.detail else ""
        print(f"error: {err.code}{detail}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

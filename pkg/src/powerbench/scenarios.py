"""Scenario suites: versioned manifest matrices plus an in-process runner.

A scenario file declares a parameter matrix and a manifest template; each
matrix cell becomes one job (its repetitions run inside the job). Labels are
the joined cell values, e.g. ``brave-mirroring`` or ``chrome-bunkyo``.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

from .agent.controller import AgentController
from .agent.runner import DONE, ExecutionRecord, handle_dispatch
from .analysis import RunSummary, Trace, compare_groups, summarize_runs

SCENARIO_DIR = Path(__file__).resolve().parents[2] / "scenarios"


def load_scenario(name_or_path: str | Path, scenario_dir: Path | None = None) -> dict:
    path = Path(name_or_path)
    if not path.suffix:
        path = (scenario_dir or SCENARIO_DIR) / f"{path.name}.json"
    return json.loads(Path(path).read_text())


def _substitute(obj, values: dict):
    if isinstance(obj, str):
        for key, val in values.items():
            obj = obj.replace("{%s}" % key, str(val))
        return obj
    if isinstance(obj, list):
        return [_substitute(x, values) for x in obj]
    if isinstance(obj, dict):
        return {k: _substitute(v, values) for k, v in obj.items()}
    return obj


def _label(values: dict) -> str:
    parts = []
    for key, val in values.items():
        if isinstance(val, bool):
            parts.append(key if val else f"no-{key}")
        else:
            parts.append(str(val))
    return "-".join(parts)


def expand_jobs(scenario: dict) -> list[tuple[str, dict]]:
    """Returns (label, manifest) pairs in deterministic matrix order."""
    matrix = scenario.get("matrix", {})
    template = scenario["template"]
    keys = list(matrix)
    jobs = []
    for index, combo in enumerate(itertools.product(*(matrix[k] for k in keys))):
        values = dict(zip(keys, combo))
        manifest = json.loads(json.dumps(_substitute(template, values)))
        manifest["repetitions"] = int(scenario.get("repetitions", 1))
        seed_base = int(manifest.pop("seed_base", 0))
        seed_step = int(manifest.pop("seed_step", 100))
        manifest["seed"] = seed_base + index * seed_step
        manifest["mirroring"] = bool(values.get("mirroring", False))
        if "network_profile" in values:
            manifest.setdefault("constraints", {})["network_profile"] = values["network_profile"]
        manifest.setdefault("experimenter", "scenario")
        manifest["scenario_values"] = values
        jobs.append((_label(values), manifest))
    return jobs


def run_scenario_local(scenario: dict, controller: AgentController,
                       start_job_id: int = 1) -> dict[str, ExecutionRecord]:
    """Execute every scenario job directly on one controller."""
    records = {}
    job_id = start_job_id
    for label, manifest in expand_jobs(scenario):
        record = handle_dispatch(controller, job_id, manifest)
        if record.outcome != DONE:
            raise RuntimeError(f"scenario job {label} failed: {record.reason}")
        records[label] = record
        job_id += 1
    return records


def summaries_by_label(records: dict[str, ExecutionRecord]) -> dict[str, RunSummary]:
    out = {}
    for label, record in records.items():
        traces = [Trace.from_file(p) for p in record.traces]
        out[label] = summarize_runs(traces)
    return out


def scenario_report(records: dict[str, ExecutionRecord]) -> dict:
    summaries = summaries_by_label(records)
    payload = {"groups": {g: s.to_dict() for g, s in summaries.items()}}
    if len(summaries) >= 2:
        payload["comparison"] = compare_groups(summaries).to_dict()
    return payload

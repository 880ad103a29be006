"""Command-line client against a live loopback coordinator."""

import json
import threading
import time

import pytest

from powerbench import cli
from powerbench.agent.config import DeviceSpec
from powerbench.coordinator.httpapi import HttpApi
from powerbench.coordinator.roles import ADMIN, EXPERIMENTER, TokenRegistry
from powerbench.coordinator.service import Coordinator
from powerbench.coordinator.types import DONE


@pytest.fixture
def stack(tmp_path, monkeypatch):
    tokens = TokenRegistry()
    tokens.add("admintok", "root", ADMIN)
    tokens.add("alicetok", "alice", EXPERIMENTER)
    coord = Coordinator(tmp_path / "coord", tokens=tokens)
    coord.register_vantage_point({
        "vp_id": "node1", "endpoint": "",
        "devices": [DeviceSpec("j7duo").to_dict()],
    }, "admintok")
    server = HttpApi(coord).start()
    monkeypatch.setenv("BL_COORDINATOR", f"http://127.0.0.1:{server.port}")
    monkeypatch.setenv("BL_TOKEN", "alicetok")
    yield coord
    server.close()


def manifest_file(tmp_path, **overrides):
    m = {"experimenter": "alice", "duration_s": 10.0, "repetitions": 1,
         "voltage": 4.0, "constraints": {"connectivity": "WIFI"}, "script": []}
    m.update(overrides)
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(m))
    return path


def test_devices_line(stack, capsys):
    assert cli.run(["devices"]) == 0
    out = capsys.readouterr().out
    assert out.strip() == "node1/j7duo ANDROID idle"


def test_submit_and_status(stack, tmp_path, capsys):
    path = manifest_file(tmp_path)
    assert cli.run(["submit", "--manifest", str(path)]) == 0
    out = capsys.readouterr().out
    assert "job 1 submitted" in out
    assert cli.run(["status", "1"]) == 0
    assert "QUEUED" in capsys.readouterr().out


def test_submit_missing_manifest_is_usage_error(stack, capsys):
    assert cli.run(["submit", "--manifest", "missing.json"]) == 2
    err = capsys.readouterr().err
    assert "missing.json" in err


def test_submit_overrides(stack, tmp_path, capsys):
    path = manifest_file(tmp_path)
    assert cli.run(["submit", "--manifest", str(path), "--repetitions", "7",
                    "--mirroring", "on", "--profile", "bunkyo"]) == 0
    capsys.readouterr()
    record = stack.get_job(1)
    assert record.manifest["repetitions"] == 7
    assert record.manifest["mirroring"] is True
    assert record.manifest["constraints"]["network_profile"] == "bunkyo"


def test_remote_error_exit_1(stack, capsys):
    assert cli.run(["status", "99"]) == 1
    assert "UnknownJob" in capsys.readouterr().err


def test_usage_error_exit_2(stack, capsys):
    assert cli.run(["frobnicate"]) == 2


def test_json_mode_single_document(stack, capsys):
    assert cli.run(["--output", "json", "devices"]) == 0
    out = capsys.readouterr().out
    doc = json.loads(out)  # exactly one parseable document on stdout
    assert doc["devices"][0]["device_id"] == "j7duo"


def test_artifacts_download(stack, tmp_path, capsys):
    path = manifest_file(tmp_path)
    cli.run(["submit", "--manifest", str(path)])
    stack.schedule_tick()
    stack.report_status(1, DONE, artifacts={"trace.csv": b"t_s\n0.0\n"})
    out_dir = tmp_path / "dl"
    assert cli.run(["artifacts", "1", "--out", str(out_dir)]) == 0
    assert (out_dir / "trace.csv").read_bytes() == b"t_s\n0.0\n"


def make_trace_bytes(current, n=61, rate=1):
    lines = ["t_s,current_ma,voltage_v"]
    lines += [f"{i / rate:.6f},{current:.6f},4.000000" for i in range(n)]
    return ("\n".join(lines) + "\n").encode()


def meta_bytes(n=61, rate=1):
    return json.dumps({"rate": rate, "voltage": 4.0, "delivered": n,
                       "lost": 0, "gaps": []}).encode()


def test_report_orders_groups(stack, tmp_path, capsys):
    path = manifest_file(tmp_path)
    for _ in range(2):
        cli.run(["submit", "--manifest", str(path)])
    capsys.readouterr()
    stack.schedule_tick()
    stack.report_status(1, DONE, artifacts={
        "r0.csv": make_trace_bytes(300.0), "r0.meta.json": meta_bytes()})
    stack.schedule_tick()
    stack.report_status(2, DONE, artifacts={
        "r0.csv": make_trace_bytes(100.0), "r0.meta.json": meta_bytes()})
    out_dir = tmp_path / "report"
    assert cli.run(["report", "1", "2", "--out", str(out_dir)]) == 0
    doc = json.loads((out_dir / "report.json").read_text())
    assert doc["comparison"]["order"] == ["job2", "job1"]
    assert (out_dir / "groups.dat").exists()
    assert (out_dir / "cdf_job1.dat").read_text().startswith("# value fraction")


def test_scenario_run_end_to_end(stack, tmp_path, capsys, monkeypatch):
    # Tiny one-cell scenario; a worker thread plays the agent.
    scen_dir = tmp_path / "scen"
    scen_dir.mkdir()
    (scen_dir / "mini.json").write_text(json.dumps({
        "name": "mini",
        "matrix": {"app": ["brave", "chrome"]},
        "repetitions": 1,
        "template": {
            "constraints": {"connectivity": "WIFI"},
            "script": [{"cmd": "launch_app", "app": "{app}"}],
            "duration_s": 30, "voltage": 4.0, "seed_base": 1, "seed_step": 1,
        },
    }))
    monkeypatch.setattr(cli, "POLL_INTERVAL_S", 0.05)
    currents = {"brave": 120.0, "chrome": 240.0}

    def worker():
        done = set()
        deadline = time.time() + 10
        while len(done) < 2 and time.time() < deadline:
            dispatches = stack.schedule_tick()
            for d in dispatches:
                app = stack.store.jobs[d.job_id].manifest["script"][0]["app"]
                stack.report_status(d.job_id, DONE, artifacts={
                    "r0.csv": make_trace_bytes(currents[app]),
                    "r0.meta.json": meta_bytes(),
                })
                done.add(d.job_id)
            time.sleep(0.02)

    t = threading.Thread(target=worker)
    t.start()
    out_dir = tmp_path / "scenario-out"
    rc = cli.run(["scenario", "run", "mini", "--out", str(out_dir),
                  "--scenario-dir", str(scen_dir)])
    t.join()
    assert rc == 0
    doc = json.loads((out_dir / "report.json").read_text())
    assert doc["comparison"]["order"] == ["brave", "chrome"]

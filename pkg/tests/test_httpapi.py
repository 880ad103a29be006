"""Experimenter HTTP API over loopback."""

import base64
import json
import urllib.error
import urllib.request

import pytest

from powerbench.agent.config import DeviceSpec
from powerbench.coordinator.httpapi import HttpApi
from powerbench.coordinator.roles import ADMIN, EXPERIMENTER, TokenRegistry
from powerbench.coordinator.service import Coordinator
from powerbench.coordinator.types import DONE


@pytest.fixture
def api(tmp_path):
    tokens = TokenRegistry()
    tokens.add("admintok", "root", ADMIN)
    tokens.add("alicetok", "alice", EXPERIMENTER)
    coord = Coordinator(tmp_path / "coord", tokens=tokens)
    coord.register_vantage_point({
        "vp_id": "node1", "endpoint": "",
        "devices": [DeviceSpec("j7duo").to_dict()],
    }, "admintok")
    server = HttpApi(coord).start()
    yield coord, f"http://127.0.0.1:{server.port}"
    server.close()


def call(base, method, path, token="alicetok", payload=None):
    body = json.dumps(payload).encode() if payload is not None else None
    req = urllib.request.Request(base + path, data=body, method=method,
                                 headers={"Authorization": f"Bearer {token}"})
    with urllib.request.urlopen(req) as resp:
        return resp.status, json.loads(resp.read())


def manifest():
    return {"experimenter": "alice", "duration_s": 10.0, "repetitions": 1,
            "voltage": 4.0, "constraints": {"connectivity": "WIFI"},
            "script": []}


def test_devices_endpoint(api):
    _, base = api
    status, doc = call(base, "GET", "/devices")
    assert status == 200
    assert doc["devices"][0]["device_id"] == "j7duo"


def test_job_lifecycle_over_http(api):
    coord, base = api
    status, doc = call(base, "POST", "/jobs", payload=manifest())
    assert status == 201
    job_id = doc["job_id"]
    status, doc = call(base, "GET", f"/jobs/{job_id}")
    assert doc["status"] == "QUEUED"
    coord.schedule_tick()
    coord.report_status(job_id, DONE, artifacts={"a.csv": b"hello"})
    status, doc = call(base, "GET", f"/jobs/{job_id}/artifacts")
    assert base64.b64decode(doc["files"]["a.csv"]) == b"hello"


def test_cancel_over_http(api):
    _, base = api
    _, doc = call(base, "POST", "/jobs", payload=manifest())
    status, doc2 = call(base, "POST", f"/jobs/{doc['job_id']}/cancel")
    assert status == 200 and doc2 == {"ok": True}


def expect_error(base, method, path, code, token="alicetok", payload=None):
    with pytest.raises(urllib.error.HTTPError) as err:
        call(base, method, path, token=token, payload=payload)
    assert err.value.code == code
    return json.loads(err.value.read())


def test_error_mapping(api):
    coord, base = api
    doc = expect_error(base, "GET", "/jobs/999", 404)
    assert doc["error"] == "UnknownJob"
    bad = manifest()
    bad["voltage"] = 99.0
    doc = expect_error(base, "POST", "/jobs", 400, payload=bad)
    assert doc["error"] == "InvalidManifest"
    doc = expect_error(base, "POST", "/jobs", 403, token="nobody",
                       payload=manifest())
    assert doc["error"] == "Unauthorized"
    _, created = call(base, "POST", "/jobs", payload=manifest())
    doc = expect_error(base, "GET", f"/jobs/{created['job_id']}/artifacts", 409)
    assert doc["error"] == "NotReady"


def test_register_vantage_point_over_http(api):
    _, base = api
    status, doc = call(base, "POST", "/vantage-points", token="admintok",
                       payload={"vp_id": "node2", "devices": []})
    assert status == 201 and doc["vp_id"] == "node2"
    doc = expect_error(base, "POST", "/vantage-points", 409, token="admintok",
                       payload={"vp_id": "node2", "devices": []})
    assert doc["error"] == "DuplicateId"

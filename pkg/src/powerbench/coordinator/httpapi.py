"""Experimenter-facing HTTP/JSON API (TLS terminated upstream)."""

from __future__ import annotations

import base64
import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..errors import (
    DuplicateId,
    Expired,
    IllegalTransition,
    InvalidManifest,
    NoMatchingDevice,
    NotReady,
    PowerbenchError,
    Unauthorized,
    UnknownJob,
)
from .service import Coordinator

STATUS_CODES = {
    Unauthorized: 403,
    UnknownJob: 404,
    InvalidManifest: 400,
    NoMatchingDevice: 400,
    NotReady: 409,
    DuplicateId: 409,
    IllegalTransition: 409,
    Expired: 410,
}

_JOB_RE = re.compile(r"^/jobs/(\d+)$")
_ARTIFACTS_RE = re.compile(r"^/jobs/(\d+)/artifacts$")


def make_handler(coordinator: Coordinator):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        def _token(self) -> str:
            auth = self.headers.get("Authorization", "")
            return auth.removeprefix("Bearer ").strip()

        def _reply(self, code: int, payload: dict):
            body = json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _error(self, err: PowerbenchError):
            code = STATUS_CODES.get(type(err), 500)
            self._reply(code, {"error": err.code, "detail": err.detail})

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length", 0))
            return json.loads(self.rfile.read(length) or b"{}")

        def do_GET(self):
            try:
                if self.path == "/devices":
                    self._reply(200, {"devices": coordinator.list_devices()})
                    return
                m = _JOB_RE.match(self.path)
                if m:
                    record = coordinator.get_job(int(m.group(1)), self._token())
                    self._reply(200, record.to_dict())
                    return
                m = _ARTIFACTS_RE.match(self.path)
                if m:
                    files = coordinator.fetch_artifacts(int(m.group(1)), self._token())
                    self._reply(200, {"files": {
                        name: base64.b64encode(data).decode("ascii")
                        for name, data in files.items()
                    }})
                    return
                self._reply(404, {"error": "NotFound"})
            except PowerbenchError as err:
                self._error(err)

        def do_POST(self):
            try:
                if self.path == "/jobs":
                    job_id = coordinator.submit_job(self._body(), self._token())
                    self._reply(201, {"job_id": job_id})
                    return
                if self.path == "/vantage-points":
                    vp_id = coordinator.register_vantage_point(
                        self._body(), self._token(),
                        source_ip=self.client_address[0])
                    self._reply(201, {"vp_id": vp_id})
                    return
                m = _JOB_RE.match(self.path.removesuffix("/cancel"))
                if m and self.path.endswith("/cancel"):
                    coordinator.cancel_job(int(m.group(1)), self._token())
                    self._reply(200, {"ok": True})
                    return
                self._reply(404, {"error": "NotFound"})
            except PowerbenchError as err:
                self._error(err)

    return Handler


class HttpApi:
    def __init__(self, coordinator: Coordinator, host: str = "127.0.0.1", port: int = 0):
        self.server = ThreadingHTTPServer((host, port), make_handler(coordinator))
        self.port = self.server.server_address[1]
        self._thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    def start(self):
        self._thread.start()
        return self

    def close(self):
        self.server.shutdown()
        self.server.server_close()

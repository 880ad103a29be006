"""Agent side of the coordinator channel: HELLO, heartbeats, dispatches."""

from __future__ import annotations

import base64
import socket
import threading
from pathlib import Path

from ..coordinator.protocol import recv_msg, send_msg
from ..errors import PowerbenchError
from .controller import AgentController
from .runner import DONE, handle_dispatch

ARTIFACT_CHUNK_BYTES = 256 * 1024


class AgentClient:
    def __init__(self, controller: AgentController, host: str, port: int,
                 token: str, heartbeat_interval_s: float | None = None):
        self.controller = controller
        self.vp_id = controller.config.vp_id
        self.token = token
        self.heartbeat_interval_s = (heartbeat_interval_s
                                     or controller.config.heartbeat_interval_s)
        self._sock = socket.create_connection((host, port))
        self._send_lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    def _send(self, obj: dict):
        with self._send_lock:
            send_msg(self._sock, obj)

    def start(self):
        self._send({"type": "HELLO", "vp_id": self.vp_id, "token": self.token})
        reply = recv_msg(self._sock)
        if not reply or reply.get("type") != "HELLO" or not reply.get("ok"):
            raise PowerbenchError("coordinator rejected HELLO")
        self._threads = [
            threading.Thread(target=self._recv_loop, daemon=True),
            threading.Thread(target=self._heartbeat_loop, daemon=True),
        ]
        for t in self._threads:
            t.start()
        return self

    def close(self):
        self._stop.set()
        try:
            self._sock.close()
        except OSError:
            pass

    def send_heartbeat(self):
        self._send({"type": "HEARTBEAT", "health": self.controller.healthcheck()})

    def _heartbeat_loop(self):
        self.send_heartbeat()
        while not self._stop.wait(self.heartbeat_interval_s):
            try:
                self.send_heartbeat()
            except OSError:
                return

    def _recv_loop(self):
        while not self._stop.is_set():
            try:
                msg = recv_msg(self._sock)
            except (OSError, ValueError):
                return
            if msg is None:
                return
            kind = msg.get("type")
            if kind == "DISPATCH":
                threading.Thread(target=self._run_job,
                                 args=(int(msg["job_id"]), msg["manifest"]),
                                 daemon=True).start()
            elif kind == "API_PROXY":
                self._run_proxy(msg)

    def _run_proxy(self, msg: dict):
        try:
            result = self.controller.api_call(msg["call"], **msg.get("args", {}))
            reply = {"ok": True, "result": result}
        except PowerbenchError as err:
            reply = {"ok": False, "error": err.code, "detail": err.detail}
        self._send({"type": "API_PROXY", "req_id": msg.get("req_id", ""), **reply})

    def _run_job(self, job_id: int, manifest: dict):
        record = handle_dispatch(self.controller, job_id, manifest)
        if record.outcome == DONE and record.bundle_dir:
            self._send_bundle(job_id, Path(record.bundle_dir))
        self._send({"type": "STATUS", "job_id": job_id, "status": record.outcome,
                    "reason": record.reason})

    def _send_bundle(self, job_id: int, bundle: Path):
        for path in sorted(bundle.iterdir()):
            if not path.is_file():
                continue
            data = path.read_bytes()
            for off in range(0, len(data) or 1, ARTIFACT_CHUNK_BYTES):
                chunk = data[off:off + ARTIFACT_CHUNK_BYTES]
                self._send({
                    "type": "ARTIFACT_CHUNK", "job_id": job_id, "name": path.name,
                    "data": base64.b64encode(chunk).decode("ascii"),
                    "eof": off + ARTIFACT_CHUNK_BYTES >= len(data),
                })

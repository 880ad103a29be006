"""Coordinator↔agent wire protocol.

Persistent TCP; each message is 4-byte big-endian length followed by UTF-8
JSON with a "type" field in {HELLO, HEARTBEAT, DISPATCH, STATUS,
ARTIFACT_CHUNK, API_PROXY, ERROR}. Connections from IPs outside the
allowlist are closed before HELLO is even parsed.
"""

from __future__ import annotations

import base64
import json
import socket
import struct
import threading
import uuid

from ..errors import PowerbenchError
from .service import Coordinator
from .types import DONE, FAILED, RUNNING

HEADER = struct.Struct(">I")
MAX_FRAME = 64 * 1024 * 1024


def send_msg(sock: socket.socket, obj: dict):
    data = json.dumps(obj).encode("utf-8")
    sock.sendall(HEADER.pack(len(data)) + data)


def recv_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


def recv_msg(sock: socket.socket) -> dict | None:
    header = recv_exact(sock, HEADER.size)
    if header is None:
        return None
    (length,) = HEADER.unpack(header)
    if length > MAX_FRAME:
        raise ValueError("frame too large")
    payload = recv_exact(sock, length)
    if payload is None:
        return None
    return json.loads(payload.decode("utf-8"))


class AgentChannel:
    """Server-side view of one connected agent."""

    def __init__(self, sock: socket.socket, vp_id: str):
        self.sock = sock
        self.vp_id = vp_id
        self.send_lock = threading.Lock()
        self.proxy_waiters: dict[str, dict] = {}
        self.proxy_events: dict[str, threading.Event] = {}

    def send(self, obj: dict):
        with self.send_lock:
            send_msg(self.sock, obj)


class CoordinatorServer:
    """TCP front end for agents plus the periodic scheduling loop."""

    def __init__(self, coordinator: Coordinator, host: str = "127.0.0.1",
                 port: int = 0, allowlist: tuple = ("127.0.0.1", "::1"),
                 agent_tokens: dict[str, str] | None = None,
                 tick_interval_s: float = 0.2):
        self.coordinator = coordinator
        self.allowlist = set(allowlist)
        self.agent_tokens = dict(agent_tokens or {})  # token -> vp_id
        self.tick_interval_s = tick_interval_s
        self.channels: dict[str, AgentChannel] = {}
        self._chunks: dict[int, dict[str, bytes]] = {}
        self._sock = socket.create_server((host, port))
        self.port = self._sock.getsockname()[1]
        self._stop = threading.Event()
        self._threads = [
            threading.Thread(target=self._accept_loop, daemon=True),
            threading.Thread(target=self._tick_loop, daemon=True),
        ]

    def start(self):
        for t in self._threads:
            t.start()
        return self

    def close(self):
        self._stop.set()
        try:
            self._sock.close()
        except OSError:
            pass
        for ch in list(self.channels.values()):
            try:
                ch.sock.close()
            except OSError:
                pass

    # -- accept / per-connection -----------------------------------------------

    def _accept_loop(self):
        while not self._stop.is_set():
            try:
                conn, addr = self._sock.accept()
            except OSError:
                return
            if self.allowlist and addr[0] not in self.allowlist:
                conn.close()
                continue
            threading.Thread(target=self._serve, args=(conn, addr), daemon=True).start()

    def _serve(self, conn: socket.socket, addr):
        channel = None
        try:
            hello = recv_msg(conn)
            if not hello or hello.get("type") != "HELLO":
                return
            vp_id = self.agent_tokens.get(hello.get("token", ""))
            if vp_id is None or vp_id != hello.get("vp_id"):
                send_msg(conn, {"type": "ERROR", "code": "Unauthorized"})
                return
            channel = AgentChannel(conn, vp_id)
            self.channels[vp_id] = channel
            channel.send({"type": "HELLO", "ok": True})
            self.coordinator.heartbeat(vp_id)
            while not self._stop.is_set():
                msg = recv_msg(conn)
                if msg is None:
                    return
                self._handle(channel, msg)
        except (OSError, ValueError):
            pass
        finally:
            if channel is not None and self.channels.get(channel.vp_id) is channel:
                del self.channels[channel.vp_id]
            conn.close()

    def _handle(self, channel: AgentChannel, msg: dict):
        kind = msg.get("type")
        if kind == "HEARTBEAT":
            self.coordinator.heartbeat(channel.vp_id, msg.get("health"))
        elif kind == "STATUS":
            job_id = int(msg["job_id"])
            status = msg["status"]
            artifacts = self._chunks.pop(job_id, None) if status in (DONE, FAILED) else None
            try:
                self.coordinator.report_status(
                    job_id, status, agent_vp=channel.vp_id,
                    artifacts=artifacts,
                    failure_reason=msg.get("reason", ""),
                )
            except PowerbenchError as err:
                channel.send({"type": "ERROR", "code": err.code, "job_id": job_id})
        elif kind == "ARTIFACT_CHUNK":
            job_id = int(msg["job_id"])
            bucket = self._chunks.setdefault(job_id, {})
            name = msg["name"]
            bucket[name] = bucket.get(name, b"") + base64.b64decode(msg["data"])
        elif kind == "API_PROXY":
            req_id = msg.get("req_id", "")
            waiter = channel.proxy_events.get(req_id)
            if waiter is not None:
                channel.proxy_waiters[req_id] = msg
                waiter.set()

    # -- outbound --------------------------------------------------------------

    def dispatch(self, d, manifest: dict) -> bool:
        channel = self.channels.get(d.vp_id)
        if channel is None:
            return False
        channel.send({"type": "DISPATCH", "job_id": d.job_id,
                      "device_id": d.device_id, "manifest": manifest})
        return True

    def api_proxy(self, vp_id: str, call: str, args: dict, timeout: float = 10.0) -> dict:
        channel = self.channels.get(vp_id)
        if channel is None:
            raise PowerbenchError(f"no channel to {vp_id}")
        req_id = uuid.uuid4().hex
        event = threading.Event()
        channel.proxy_events[req_id] = event
        channel.send({"type": "API_PROXY", "req_id": req_id, "call": call, "args": args})
        if not event.wait(timeout):
            channel.proxy_events.pop(req_id, None)
            raise TimeoutError(f"api proxy to {vp_id} timed out")
        channel.proxy_events.pop(req_id, None)
        return channel.proxy_waiters.pop(req_id)

    # -- scheduling loop -------------------------------------------------------

    def _tick_loop(self):
        while not self._stop.wait(self.tick_interval_s):
            self.tick()

    def tick(self):
        self.coordinator.expire_offline_jobs()
        for d in self.coordinator.schedule_tick():
            manifest = self.coordinator.store.jobs[d.job_id].manifest
            if not self.dispatch(d, manifest):
                # Channel dropped between heartbeat and dispatch; job will be
                # failed by the offline policy once the grace period passes.
                pass

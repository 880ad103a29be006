"""Session transport: HTTP control endpoints plus the WebSocket frame stream.

Messages on the socket are JSON text: FRAME (server→client), INPUT and
TOOLBAR (client→server), ACK and ERROR (server→client).
"""

from __future__ import annotations

import json
import re
import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..errors import PowerbenchError
from . import wsproto
from .session import ChannelDelayModel, SessionManager

_SESSION_PATH = re.compile(r"^/session/(\w+)$")
_CLOSE_RE = re.compile(r"^/sessions/(\w+)/close$")


class RealTimeDriver:
    """Steps the controller's virtual clock at wall pace (speed x realtime)."""

    def __init__(self, controller, speed: float = 1.0):
        self.controller = controller
        self.speed = speed
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._loop, daemon=True)

    def start(self):
        self._thread.start()
        return self

    def close(self):
        self._stop.set()

    def _loop(self):
        from ..agent.controller import STEP
        period = float(STEP) / self.speed
        while not self._stop.wait(period):
            self.controller.tick()


class SessionHttpApi:
    """Open/close/list sessions over HTTP (the GUI backend port)."""

    def __init__(self, manager: SessionManager, host: str = "127.0.0.1", port: int = 0):
        self.manager = manager
        api = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):
                pass

            def _reply(self, code, payload):
                body = json.dumps(payload).encode()
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/sessions":
                    self._reply(200, {"sessions": [
                        {"session_id": s.session_id, "device_id": s.device_id,
                         "open": s.open, "toolbar_enabled": s.toolbar_enabled}
                        for s in api.manager.sessions.values()
                    ]})
                else:
                    self._reply(404, {"error": "NotFound"})

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                try:
                    if self.path == "/sessions":
                        delay = body.get("channel_delay", {})
                        session = api.manager.open_session(
                            body["device_id"],
                            toolbar_enabled=body.get("toolbar_enabled", True),
                            delay_model=ChannelDelayModel(
                                mean_s=float(delay.get("mean_s", 0.05)),
                                std_s=float(delay.get("std_s", 0.0)),
                                seed=int(delay.get("seed", 0)),
                            ),
                        )
                        self._reply(201, {"session_id": session.session_id})
                        return
                    m = _CLOSE_RE.match(self.path)
                    if m:
                        api.manager.close_session(m.group(1))
                        self._reply(200, {"ok": True})
                        return
                    self._reply(404, {"error": "NotFound"})
                except PowerbenchError as err:
                    self._reply(409, {"error": err.code, "detail": err.detail})

        self.server = ThreadingHTTPServer((host, port), Handler)
        self.port = self.server.server_address[1]
        self._thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    def start(self):
        self._thread.start()
        return self

    def close(self):
        self.server.shutdown()
        self.server.server_close()


class SessionStreamServer:
    """WebSocket endpoint ws://host:port/session/{id}."""

    def __init__(self, manager: SessionManager, host: str = "127.0.0.1", port: int = 0):
        self.manager = manager
        self._sock = socket.create_server((host, port))
        self.port = self._sock.getsockname()[1]
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)

    def start(self):
        self._thread.start()
        return self

    def close(self):
        self._stop.set()
        try:
            self._sock.close()
        except OSError:
            pass

    def _accept_loop(self):
        while not self._stop.is_set():
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _serve(self, conn: socket.socket):
        try:
            path = wsproto.accept_handshake(conn)
            if path is None:
                return
            m = _SESSION_PATH.match(path.split("?")[0])
            if m is None:
                wsproto.send_text(conn, json.dumps({"type": "ERROR", "code": "NotFound"}))
                return
            try:
                session = self.manager.get(m.group(1))
                client = session.subscribe()
            except PowerbenchError as err:
                wsproto.send_text(conn, json.dumps({"type": "ERROR", "code": err.code}))
                return
            send_lock = threading.Lock()
            stop = threading.Event()

            def pump_frames():
                queue = session.clients.get(client)
                while not stop.is_set() and session.open and queue is not None:
                    if queue:
                        event = queue.popleft()
                        frame = {"type": "FRAME", "seq": event.seq,
                                 "t": event.t_emitted, "digest": str(event.digest),
                                 "dirty": event.dirty, "screen": event.screen,
                                 "ma": event.current_ma}
                        with send_lock:
                            wsproto.send_text(conn, json.dumps(frame))
                    else:
                        time.sleep(0.005)
                    queue = session.clients.get(client)

            pump = threading.Thread(target=pump_frames, daemon=True)
            pump.start()
            try:
                while True:
                    raw = wsproto.recv_message(conn)
                    if raw is None:
                        return
                    msg = json.loads(raw)
                    reply = self._handle(session, msg)
                    with send_lock:
                        wsproto.send_text(conn, json.dumps(reply))
            finally:
                stop.set()
                session.clients.pop(client, None)
        except (OSError, ValueError, ConnectionError):
            pass
        finally:
            conn.close()

    def _handle(self, session, msg: dict) -> dict:
        msg_id = msg.get("id")
        try:
            if msg.get("type") == "INPUT":
                ack = session.inject(msg.get("kind", "tap"),
                                     x=int(msg.get("x", 0)), y=int(msg.get("y", 0)),
                                     code=msg.get("code", ""))
                return {"type": "ACK", "id": msg_id, **ack}
            if msg.get("type") == "TOOLBAR":
                result = session.toolbar_action(msg.get("action", ""),
                                                **msg.get("args", {}))
                return {"type": "ACK", "id": msg_id, "result": result}
            return {"type": "ERROR", "id": msg_id, "code": "BadMessage"}
        except PowerbenchError as err:
            return {"type": "ERROR", "id": msg_id, "code": err.code,
                    "detail": err.detail}
        except ValueError as err:
            return {"type": "ERROR", "id": msg_id, "code": "BadMessage",
                    "detail": str(err)}

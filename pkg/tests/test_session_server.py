"""WebSocket framing and the live session stream over loopback."""

import json
import socket
import threading
import time

import pytest

from powerbench.session import SessionHttpApi, SessionManager, SessionStreamServer
from powerbench.session import wsproto


class TestWsProto:
    def run_pair(self, server_fn, client_fn):
        a, b = socket.socketpair()
        try:
            t = threading.Thread(target=server_fn, args=(a,))
            t.start()
            out = client_fn(b)
            t.join(timeout=5)
            return out
        finally:
            a.close()
            b.close()

    def test_text_roundtrip_masked_and_clear(self):
        a, b = socket.socketpair()
        try:
            wsproto.send_text(a, "hello", mask=True)
            assert wsproto.recv_message(b) == "hello"
            wsproto.send_text(b, "world", mask=False)
            assert wsproto.recv_message(a) == "world"
        finally:
            a.close()
            b.close()

    def test_long_payload_extended_length(self):
        a, b = socket.socketpair()
        try:
            big = "x" * 70000
            wsproto.send_text(a, big)
            assert wsproto.recv_message(b) == big
        finally:
            a.close()
            b.close()

    def test_ping_answered_with_pong(self):
        a, b = socket.socketpair()
        try:
            a.sendall(bytes([0x80 | wsproto.OP_PING, 2]) + b"hi")
            wsproto.send_text(a, "after")
            assert wsproto.recv_message(b) == "after"
            reply = a.recv(16)
            assert reply[0] & 0x0F == wsproto.OP_PONG
            assert reply[2:4] == b"hi"
        finally:
            a.close()
            b.close()

    def test_close_returns_none(self):
        a, b = socket.socketpair()
        try:
            a.sendall(bytes([0x80 | wsproto.OP_CLOSE, 0]))
            assert wsproto.recv_message(b) is None
        finally:
            a.close()
            b.close()

    def test_handshake(self):
        a, b = socket.socketpair()
        try:
            t = threading.Thread(target=wsproto.client_handshake,
                                 args=(b, "localhost", "/session/abc"))
            t.start()
            path = wsproto.accept_handshake(a)
            t.join(timeout=5)
            assert path == "/session/abc"
        finally:
            a.close()
            b.close()


@pytest.fixture
def stream_stack(controller):
    manager = SessionManager(controller)
    http = SessionHttpApi(manager).start()
    stream = SessionStreamServer(manager).start()
    yield controller, manager, http, stream
    stream.close()
    http.close()


def open_session(http_port, device_id="j7duo", **extra):
    import urllib.request
    body = json.dumps({"device_id": device_id, **extra}).encode()
    req = urllib.request.Request(f"http://127.0.0.1:{http_port}/sessions",
                                 data=body, method="POST")
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())["session_id"]


def ws_connect(port, session_id):
    sock = socket.create_connection(("127.0.0.1", port))
    wsproto.client_handshake(sock, "127.0.0.1", f"/session/{session_id}")
    return sock


def test_http_open_close_list(stream_stack):
    controller, manager, http, stream = stream_stack
    session_id = open_session(http.port)
    import urllib.request
    with urllib.request.urlopen(f"http://127.0.0.1:{http.port}/sessions") as resp:
        doc = json.loads(resp.read())
    assert doc["sessions"][0]["session_id"] == session_id
    req = urllib.request.Request(
        f"http://127.0.0.1:{http.port}/sessions/{session_id}/close", data=b"{}",
        method="POST")
    with urllib.request.urlopen(req) as resp:
        assert json.loads(resp.read()) == {"ok": True}
    assert not manager.get(session_id).open


def test_frames_stream_in_seq_order(stream_stack):
    controller, manager, http, stream = stream_stack
    session_id = open_session(http.port)
    sock = ws_connect(stream.port, session_id)
    try:
        # The server subscribes after the handshake reply; wait for it so the
        # finite drive below cannot outrun the subscription.
        session = manager.get(session_id)
        deadline = time.time() + 5
        while not session.clients and time.time() < deadline:
            time.sleep(0.005)
        assert session.clients
        driver_done = threading.Event()

        def drive():
            controller.run_for(2.0)
            driver_done.set()

        threading.Thread(target=drive, daemon=True).start()
        seqs = []
        while len(seqs) < 30:
            msg = json.loads(wsproto.recv_message(sock))
            assert msg["type"] == "FRAME"
            seqs.append(msg["seq"])
        assert seqs == sorted(seqs)
        assert len(set(seqs)) == len(seqs)
        driver_done.wait(10)
    finally:
        sock.close()


def test_input_and_toolbar_over_ws(stream_stack):
    controller, manager, http, stream = stream_stack
    session_id = open_session(http.port)
    sock = ws_connect(stream.port, session_id)
    try:
        wsproto.send_text(sock, json.dumps(
            {"type": "INPUT", "id": 1, "kind": "tap", "x": 10, "y": 10}),
            mask=True)
        msg = json.loads(wsproto.recv_message(sock))
        assert msg["type"] == "ACK" and msg["id"] == 1 and msg["ack"]
        wsproto.send_text(sock, json.dumps(
            {"type": "TOOLBAR", "id": 2, "action": "list_devices"}), mask=True)
        msg = json.loads(wsproto.recv_message(sock))
        assert msg == {"type": "ACK", "id": 2, "result": ["j7duo"]}
        # errors surface as codes, verbatim
        wsproto.send_text(sock, json.dumps(
            {"type": "TOOLBAR", "id": 3, "action": "start_monitor",
             "args": {"device_id": "j7duo", "duration": 1.0}}), mask=True)
        msg = json.loads(wsproto.recv_message(sock))
        assert msg["type"] == "ERROR" and msg["code"] == "MeterOff"
        wsproto.send_text(sock, json.dumps(
            {"type": "INPUT", "id": 4, "kind": "tap", "x": -5, "y": 10}),
            mask=True)
        msg = json.loads(wsproto.recv_message(sock))
        assert msg["type"] == "ERROR" and msg["code"] == "OutOfBounds"
    finally:
        sock.close()


def test_unknown_session_rejected(stream_stack):
    controller, manager, http, stream = stream_stack
    sock = ws_connect(stream.port, "doesnotexist")
    try:
        msg = json.loads(wsproto.recv_message(sock))
        assert msg == {"type": "ERROR", "code": "SessionClosed"}
    finally:
        sock.close()


def test_duplicate_session_conflict(stream_stack):
    import urllib.error
    import urllib.request
    controller, manager, http, stream = stream_stack
    open_session(http.port)
    with pytest.raises(urllib.error.HTTPError) as err:
        open_session(http.port)
    assert err.value.code == 409
    assert json.loads(err.value.read())["error"] == "SessionExists"

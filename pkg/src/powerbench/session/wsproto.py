"""Minimal WebSocket (RFC 6455) framing: text messages only.

Enough for the console's full-duplex channel; no extensions, no
fragmentation of outbound messages, ping/pong answered transparently.
"""

from __future__ import annotations

import base64
import hashlib
import os
import socket
import struct

GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_TEXT = 0x1
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


def _accept_key(key: str) -> str:
    digest = hashlib.sha1((key + GUID).encode()).digest()
    return base64.b64encode(digest).decode()


def read_http_head(sock: socket.socket) -> str:
    # One byte at a time: never consume past the terminator, or a frame sent
    # right after the handshake response would be swallowed with it.
    data = b""
    while not data.endswith(b"\r\n\r\n"):
        chunk = sock.recv(1)
        if not chunk:
            return ""
        data += chunk
    return data.decode("latin-1")


def accept_handshake(sock: socket.socket) -> str | None:
    """Server side; returns the request path or None if not a WS upgrade."""
    head = read_http_head(sock)
    if not head:
        return None
    lines = head.split("\r\n")
    path = lines[0].split(" ")[1] if len(lines[0].split(" ")) > 1 else "/"
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            k, v = line.split(":", 1)
            headers[k.strip().lower()] = v.strip()
    key = headers.get("sec-websocket-key")
    if headers.get("upgrade", "").lower() != "websocket" or not key:
        sock.sendall(b"HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\n\r\n")
        return None
    resp = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\nConnection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {_accept_key(key)}\r\n\r\n"
    )
    sock.sendall(resp.encode())
    return path


def client_handshake(sock: socket.socket, host: str, path: str):
    key = base64.b64encode(os.urandom(16)).decode()
    req = (
        f"GET {path} HTTP/1.1\r\nHost: {host}\r\n"
        "Upgrade: websocket\r\nConnection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\nSec-WebSocket-Version: 13\r\n\r\n"
    )
    sock.sendall(req.encode())
    head = read_http_head(sock)
    if "101" not in head.split("\r\n")[0]:
        raise ConnectionError("websocket handshake refused")


def _recv_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


def send_text(sock: socket.socket, text: str, mask: bool = False):
    payload = text.encode("utf-8")
    header = bytes([0x80 | OP_TEXT])
    n = len(payload)
    mask_bit = 0x80 if mask else 0
    if n < 126:
        header += bytes([mask_bit | n])
    elif n < 1 << 16:
        header += bytes([mask_bit | 126]) + struct.pack(">H", n)
    else:
        header += bytes([mask_bit | 127]) + struct.pack(">Q", n)
    if mask:
        key = os.urandom(4)
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        header += key
    sock.sendall(header + payload)


def recv_message(sock: socket.socket) -> str | None:
    """Next text message, answering pings; None on close / EOF."""
    while True:
        head = _recv_exact(sock, 2)
        if head is None:
            return None
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        n = head[1] & 0x7F
        if n == 126:
            ext = _recv_exact(sock, 2)
            if ext is None:
                return None
            (n,) = struct.unpack(">H", ext)
        elif n == 127:
            ext = _recv_exact(sock, 8)
            if ext is None:
                return None
            (n,) = struct.unpack(">Q", ext)
        key = _recv_exact(sock, 4) if masked else b""
        if masked and key is None:
            return None
        payload = _recv_exact(sock, n) if n else b""
        if payload is None:
            return None
        if masked:
            payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        if opcode == OP_TEXT:
            return payload.decode("utf-8")
        if opcode == OP_CLOSE:
            return None
        if opcode == OP_PING:
            sock.sendall(bytes([0x80 | OP_PONG, len(payload)]) + payload)
        # ignore pongs / continuation of control traffic

"""Minimal RFC 6455 WebSocket framing and handshakes (text frames only).

Enough protocol for the live-serve endpoint and its tests: no extensions,
no fragmentation (messages fit one frame), ping/pong and close handled.
"""

from __future__ import annotations

import base64
import hashlib
import os
import struct

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_TEXT = 0x1
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class WsClosed(ConnectionError):
    pass


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def encode_frame(payload: bytes, opcode=OP_TEXT, mask=False) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    mask_bit = 0x80 if mask else 0
    if n < 126:
        head += bytes([mask_bit | n])
    elif n < 65536:
        head += bytes([mask_bit | 126]) + struct.pack(">H", n)
    else:
        head += bytes([mask_bit | 127]) + struct.pack(">Q", n)
    if mask:
        key = os.urandom(4)
        masked = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        return head + key + masked
    return head + payload


def _read_exact(sock, n):
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise WsClosed("socket closed mid-frame")
        buf += chunk
    return buf


def read_frame(sock):
    """Read one frame; returns (opcode, payload bytes)."""
    b0, b1 = _read_exact(sock, 2)
    opcode = b0 & 0x0F
    masked = bool(b1 & 0x80)
    n = b1 & 0x7F
    if n == 126:
        n = struct.unpack(">H", _read_exact(sock, 2))[0]
    elif n == 127:
        n = struct.unpack(">Q", _read_exact(sock, 8))[0]
    key = _read_exact(sock, 4) if masked else None
    payload = _read_exact(sock, n) if n else b""
    if key:
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return opcode, payload


def read_text(sock) -> str:
    """Read frames until a text frame arrives; answers pings, raises on close."""
    while True:
        opcode, payload = read_frame(sock)
        if opcode == OP_TEXT:
            return payload.decode("utf-8")
        if opcode == OP_PING:
            sock.sendall(encode_frame(payload, opcode=OP_PONG))
            continue
        if opcode == OP_CLOSE:
            raise WsClosed("peer sent close")
        # binary/continuation unsupported; ignore


def send_text(sock, text: str, mask=False):
    sock.sendall(encode_frame(text.encode("utf-8"), opcode=OP_TEXT, mask=mask))


def send_close(sock):
    try:
        sock.sendall(encode_frame(b"", opcode=OP_CLOSE))
    except OSError:
        pass


class ClientConn:
    """Client-side connection holding bytes over-read during the handshake."""

    def __init__(self, sock, leftover=b""):
        self._sock = sock
        self._buf = leftover

    def recv(self, n):
        if self._buf:
            out, self._buf = self._buf[:n], self._buf[n:]
            return out
        return self._sock.recv(n)

    def sendall(self, data):
        self._sock.sendall(data)

    def settimeout(self, t):
        self._sock.settimeout(t)

    def close(self):
        self._sock.close()


def client_handshake(sock, host, path="/ws") -> ClientConn:
    """Perform the client side of the upgrade; raises on refusal.

    Returns a ClientConn; frame bytes that arrived glued to the 101 response
    are preserved in its buffer.
    """
    key = base64.b64encode(os.urandom(16)).decode("ascii")
    req = (f"GET {path} HTTP/1.1\r\nHost: {host}\r\nUpgrade: websocket\r\n"
           f"Connection: Upgrade\r\nSec-WebSocket-Key: {key}\r\n"
           f"Sec-WebSocket-Version: 13\r\n\r\n")
    sock.sendall(req.encode("ascii"))
    response = b""
    while b"\r\n\r\n" not in response:
        chunk = sock.recv(4096)
        if not chunk:
            raise WsClosed("server closed during handshake")
        response += chunk
    head, _, leftover = response.partition(b"\r\n\r\n")
    status = head.split(b"\r\n", 1)[0]
    if b"101" not in status:
        raise WsClosed(f"upgrade refused: {status.decode('latin1')}")
    expected = accept_key(key)
    if expected.encode("ascii") not in head:
        raise WsClosed("bad Sec-WebSocket-Accept")
    return ClientConn(sock, leftover)

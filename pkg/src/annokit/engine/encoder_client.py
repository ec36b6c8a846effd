"""Line-delimited JSON protocol for an external token encoder service.

Request:  {"tokens": ["w1", "w2", ...]}\n
Response: {"vectors": [[...], [...], ...]}\n

The client keeps one connection per call (the service is local); a small
threaded stub server backs tests and doubles as a reference implementation.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading


class EncoderProtocolError(Exception):
    pass


class EncoderClient:
    """Blocking client for the encoder line protocol."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, timeout: float = 10.0):
        self.host = host
        self.port = port
        self.timeout = timeout

    def encode(self, tokens: list[str]) -> list[list[float]]:
        payload = (json.dumps({"tokens": tokens}) + "\n").encode("utf-8")
        with socket.create_connection((self.host, self.port), timeout=self.timeout) as conn:
            conn.sendall(payload)
            buf = b""
            while not buf.endswith(b"\n"):
                chunk = conn.recv(65536)
                if not chunk:
                    break
                buf += chunk
        try:
            obj = json.loads(buf.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise EncoderProtocolError(f"bad encoder response: {e}") from e
        vectors = obj.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(tokens):
            raise EncoderProtocolError("encoder returned wrong vector count")
        return vectors


class _StubHandler(socketserver.StreamRequestHandler):
    def handle(self):
        line = self.rfile.readline()
        if not line:
            return
        request = json.loads(line.decode("utf-8"))
        vectors = [self.server.embed(tok) for tok in request["tokens"]]
        self.wfile.write((json.dumps({"vectors": vectors}) + "\n").encode("utf-8"))


class StubEncoderServer(socketserver.ThreadingTCPServer):
    """Deterministic per-token stub encoder for tests and local runs."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, dim: int = 8, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _StubHandler)
        self.dim = dim

    def embed(self, token: str) -> list[float]:
        h = 2166136261
        vec = []
        for d in range(self.dim):
            for b in f"{d}:{token}".encode("utf-8"):
                h = ((h ^ b) * 16777619) & 0xFFFFFFFF
            vec.append((h % 2000) / 1000.0 - 1.0)
        return vec

    def __enter__(self):
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self.shutdown()
        self.server_close()

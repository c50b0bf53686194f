"""Local HTTP service for pairwise preference elicitation.

Serves the elicitation UI's static assets plus a small JSON API that one
participant drives:

    GET  /api/session            session id, scenario, progress
    GET  /api/pairs/{i}          the i-th pair's payloads and answer state
    POST /api/pairs/{i}/choice   {"choice": "left"|"right"}
    GET  /api/export             preference file for the completed session

Every choice is persisted atomically before the response goes out, so a
crash loses at most the in-flight choice.  Re-submitting a choice
overwrites the stored one.  Mutations are serialized behind a lock; the
server is single-session by design.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .scenarios import FORMAT_PREFS, FORMAT_VERSION, load_pairs
from .signals import Signal, load_signals
from .store import load_session, new_session, save_session

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".svg": "image/svg+xml",
}

_PLACEHOLDER_PAGE = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>wstlpref elicitation</title></head>
<body><h1>Elicitation service is running</h1>
<p>No UI assets were found. Build the frontend (see frontend/README.md) or
point --assets at a build directory. The JSON API under /api is live.</p>
</body></html>
"""


def _signal_payload(sid: str, sig: Signal) -> dict:
    out: dict = {"id": sid, "dt": sig.dt, "length": sig.t_final + 1}
    for ch in sig.channels:
        row = sig.channel(ch.name)
        if ch.kind == "boolean":
            out[ch.name] = [bool(v > 0) for v in row]
        else:
            out[ch.name] = [float(v) for v in row]
    return out


class ElicitationState:
    """Session plus signal store shared by request handlers."""

    def __init__(
        self,
        pairs_file: str,
        session_file: str,
        seed: int = 0,
        scenario: str | None = None,
    ):
        self.pairs_file = str(pairs_file)
        self.session_file = str(session_file)
        self.pairs, signals_file = load_pairs(pairs_file)
        if signals_file is None:
            raise ValueError(f"{pairs_file} does not reference a signals file")
        signals_path = Path(pairs_file).parent / signals_file
        self.signals, self.meta = load_signals(signals_path)
        self.signals_file = signals_file
        self.lock = threading.Lock()
        if Path(session_file).exists():
            self.session = load_session(session_file)
            if len(self.session.layout) != len(self.pairs):
                raise ValueError(
                    f"{session_file} does not match the pair set "
                    f"({len(self.session.layout)} vs {len(self.pairs)} pairs)"
                )
        else:
            self.session = new_session(
                self.pairs,
                pairs_file=str(pairs_file),
                seed=seed,
                scenario=scenario or self.meta.get("scenario", ""),
            )
            save_session(session_file, self.session)

    # -- API payloads -------------------------------------------------------

    def session_info(self) -> dict:
        s = self.session
        return {
            "id": s.id,
            "scenario": s.scenario,
            "total": s.total,
            "answered": s.answered,
            "progress": s.answered / s.total if s.total else 1.0,
            "markers": self.meta.get("markers", {}),
        }

    def pair_payload(self, index: int) -> dict:
        s = self.session
        if not 0 <= index < s.total:
            raise IndexError(index)
        left, right = s.layout[index]
        return {
            "index": index,
            "total": s.total,
            "left": _signal_payload(left, self.signals[left]),
            "right": _signal_payload(right, self.signals[right]),
            "answered": s.choices[index],
            "markers": self.meta.get("markers", {}),
        }

    def record_choice(self, index: int, choice: str) -> dict:
        with self.lock:
            self.session = self.session.with_choice(index, choice)
            save_session(self.session_file, self.session)
        return self.session_info()

    def export(self) -> dict:
        with self.lock:
            prefs = self.session.preferences()
        return {
            "format": FORMAT_PREFS,
            "version": FORMAT_VERSION,
            "pairs": [{"preferred": a, "non_preferred": b} for a, b in prefs],
            "signals_file": self.signals_file,
            "meta": {"session": self.session.id, "scenario": self.session.scenario},
        }


class _Handler(BaseHTTPRequestHandler):
    state: ElicitationState
    assets_dir: Path | None = None

    # -- plumbing -----------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send_json(self, doc, status: int = 200) -> None:
        body = json.dumps(doc).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._send_json({"error": message}, status)

    def _send_asset(self, rel: str) -> None:
        if rel in ("", "/"):
            rel = "index.html"
        if self.assets_dir is None:
            if rel == "index.html":
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(_PLACEHOLDER_PAGE)))
                self.end_headers()
                self.wfile.write(_PLACEHOLDER_PAGE)
                return
            self._error(404, f"no such asset: {rel}")
            return
        target = (self.assets_dir / rel).resolve()
        if not str(target).startswith(str(self.assets_dir.resolve())) or not target.is_file():
            self._error(404, f"no such asset: {rel}")
            return
        body = target.read_bytes()
        self.send_response(200)
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    # -- routes -------------------------------------------------------------

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        try:
            if path == "/api/session":
                self._send_json(self.state.session_info())
            elif path.startswith("/api/pairs/"):
                index = self._pair_index(path.removeprefix("/api/pairs/"))
                if index is None:
                    return
                self._send_json(self.state.pair_payload(index))
            elif path == "/api/export":
                try:
                    self._send_json(self.state.export())
                except ValueError as e:
                    self._error(409, str(e))
            elif path.startswith("/api"):
                self._error(404, f"unknown endpoint {path}")
            else:
                self._send_asset(path.lstrip("/"))
        except BrokenPipeError:  # client went away mid-response
            pass

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        if not (path.startswith("/api/pairs/") and path.endswith("/choice")):
            self._error(404, f"unknown endpoint {path}")
            return
        index = self._pair_index(path.removeprefix("/api/pairs/").removesuffix("/choice"))
        if index is None:
            return
        length = int(self.headers.get("Content-Length", 0))
        try:
            body = json.loads(self.rfile.read(length) or b"{}")
            choice = body["choice"]
        except (ValueError, KeyError):
            self._error(400, 'body must be JSON like {"choice": "left"}')
            return
        try:
            self._send_json(self.state.record_choice(index, choice))
        except (IndexError, ValueError) as e:
            self._error(400, str(e))

    def _pair_index(self, raw: str) -> int | None:
        try:
            index = int(raw)
        except ValueError:
            self._error(404, f"bad pair index {raw!r}")
            return None
        if not 0 <= index < self.state.session.total:
            self._error(404, f"pair index {index} outside [0, {self.state.session.total})")
            return None
        return index


class ElicitationServer:
    """Owns the HTTP server thread; use as a context manager in tests."""

    def __init__(
        self,
        pairs_file: str,
        session_file: str,
        host: str = "127.0.0.1",
        port: int = 0,
        seed: int = 0,
        assets_dir: str | None = None,
    ):
        self.state = ElicitationState(pairs_file, session_file, seed=seed)
        handler = type(
            "BoundHandler",
            (_Handler,),
            {
                "state": self.state,
                "assets_dir": Path(assets_dir) if assets_dir else None,
            },
        )
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> str:
        host, port = self.httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "ElicitationServer":
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

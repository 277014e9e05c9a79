"""HTTP face of the engine: a small WSGI app over threaded stdlib serving.

Every response carries the ``X-Snapshot-Version`` header of the snapshot
that produced it, and every handler reads exactly one snapshot reference up
front, so responses are internally consistent even while a reload swaps the
active snapshot. Bodies are JSON except for rendered reports, which are
served as XML or CSV bytes exactly as the reporting layer produced them.

Errors come back as ``{"error": <slug>, "detail": <message>}`` with 400 for
malformed requests, 404 for unknown paths and unknown report ids, 405 for
known paths with the wrong method, and 422 for requests that are well-formed
but violate domain rules (for example a selection naming unknown node ids —
the detail lists every offender). Permissive CORS headers are attached to
every response so browser clients can talk to a locally running service.
"""

from __future__ import annotations

import json
import socketserver
from typing import Callable, Iterable
from urllib.parse import parse_qs
from wsgiref.simple_server import WSGIRequestHandler, WSGIServer, make_server

from .engine import (
    Engine,
    EngineSnapshot,
    WhatIfRequest,
    model_payload,
    reports_payload,
    trace_payload,
    variants_payload,
    whatif,
)
from .errors import (
    FormatError,
    InnotreeError,
    UnknownNodeError,
    UnknownReportError,
    UnknownTableError,
)
from .reports import render_static, run_dynamic

_JSON = "application/json; charset=utf-8"
_XML = "application/xml; charset=utf-8"
_CSV = "text/csv; charset=utf-8"

_STATIC_PREFIX = "/api/reports/static/"
_PIVOT_PREFIX = "/api/reports/pivot/"

_METHODS = {
    "/api/health": ("GET",),
    "/api/model": ("GET",),
    "/api/reports": ("GET",),
    "/api/whatif": ("POST",),
    "/api/variants": ("GET",),
    "/api/rules/trace": ("POST",),
    "/api/reload": ("POST",),
}


class _HttpError(Exception):
    def __init__(self, status: int, error: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.error = error
        self.detail = detail


_STATUS_TEXT = {
    200: "200 OK",
    204: "204 No Content",
    400: "400 Bad Request",
    404: "404 Not Found",
    405: "405 Method Not Allowed",
    422: "422 Unprocessable Entity",
    500: "500 Internal Server Error",
}

_CORS_HEADERS = [
    ("Access-Control-Allow-Origin", "*"),
    ("Access-Control-Allow-Methods", "GET, POST, OPTIONS"),
    ("Access-Control-Allow-Headers", "Content-Type"),
]


def _error_slug(exc: InnotreeError) -> tuple[int, str]:
    if isinstance(exc, UnknownReportError):
        return 404, "unknown-report"
    if isinstance(exc, UnknownTableError):
        return 404, "unknown-table"
    if isinstance(exc, FormatError):
        return 400, "format"
    if isinstance(exc, UnknownNodeError):
        return 422, "unknown-node"
    return 422, "domain"


def _json_bytes(payload: object) -> bytes:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False,
                      separators=(",", ": ")).encode("utf-8")


def _read_json_object(environ: dict) -> dict:
    try:
        length = int(environ.get("CONTENT_LENGTH") or 0)
    except ValueError:
        length = 0
    raw = environ["wsgi.input"].read(length) if length > 0 else b""
    if not raw:
        raise _HttpError(400, "bad-request", "a JSON request body is required")
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise _HttpError(400, "bad-request", f"malformed JSON body: {exc}")
    if not isinstance(data, dict):
        raise _HttpError(400, "bad-request", "the JSON body must be an object")
    return data


def _string_list(data: dict, key: str) -> list[str]:
    value = data.get(key)
    if not isinstance(value, list) or any(not isinstance(x, str)
                                          for x in value):
        raise _HttpError(400, "bad-request",
                         f"{key!r} must be a list of strings")
    return value


def _optional_number(data: dict, key: str) -> float | None:
    value = data.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _HttpError(400, "bad-request", f"{key!r} must be a number")
    return float(value)


def _parse_limit(environ: dict) -> int:
    query = parse_qs(environ.get("QUERY_STRING", ""))
    values = query.get("limit")
    if not values:
        raise _HttpError(400, "bad-request",
                         "query parameter 'limit' is required")
    try:
        limit = int(values[0])
    except ValueError:
        raise _HttpError(400, "bad-request",
                         f"'limit' must be an integer, got {values[0]!r}")
    if limit < 1:
        raise _HttpError(400, "bad-request",
                         f"'limit' must be at least 1, got {limit}")
    return limit


def _dispatch(engine: Engine, snapshot: EngineSnapshot, method: str,
              path: str, environ: dict) -> tuple[str, bytes, int]:
    """Route one request; returns (content type, body, snapshot version)."""
    if path in _METHODS and method not in _METHODS[path]:
        raise _HttpError(405, "method-not-allowed",
                         f"{path} allows: {', '.join(_METHODS[path])}")

    if path == "/api/health":
        return _JSON, _json_bytes({"status": "ok",
                                   "version": snapshot.version}), \
            snapshot.version
    if path == "/api/model":
        return _JSON, _json_bytes(model_payload(snapshot)), snapshot.version
    if path == "/api/reports":
        return _JSON, _json_bytes(reports_payload(snapshot)), \
            snapshot.version
    if path == "/api/whatif":
        data = _read_json_object(environ)
        request = WhatIfRequest(
            selection=tuple(_string_list(data, "selection")),
            param=_optional_number(data, "param"))
        response = whatif(snapshot, request)
        return _JSON, _json_bytes(response.to_dict()), snapshot.version
    if path == "/api/variants":
        limit = _parse_limit(environ)
        return _JSON, _json_bytes(variants_payload(snapshot, limit)), \
            snapshot.version
    if path == "/api/rules/trace":
        data = _read_json_object(environ)
        payload = trace_payload(snapshot, _string_list(data, "facts"))
        return _JSON, _json_bytes(payload), snapshot.version
    if path == "/api/reload":
        fresh = engine.reload()
        return _JSON, _json_bytes({"status": "reloaded",
                                   "version": fresh.version}), fresh.version
    if path.startswith(_STATIC_PREFIX):
        if method != "GET":
            raise _HttpError(405, "method-not-allowed", "use GET")
        report_id = path[len(_STATIC_PREFIX):]
        definition = snapshot.reports.static(report_id)
        return _XML, render_static(definition, snapshot.schema), \
            snapshot.version
    if path.startswith(_PIVOT_PREFIX):
        if method != "GET":
            raise _HttpError(405, "method-not-allowed", "use GET")
        report_id = path[len(_PIVOT_PREFIX):]
        definition = snapshot.reports.dynamic(report_id)
        return _CSV, run_dynamic(definition, snapshot.schema), \
            snapshot.version
    raise _HttpError(404, "not-found", f"unknown path {path!r}")


def make_app(engine: Engine) -> Callable:
    """Build the WSGI application over one engine instance."""

    def app(environ: dict, start_response: Callable) -> Iterable[bytes]:
        method = environ["REQUEST_METHOD"]
        path = environ.get("PATH_INFO", "")
        if method == "OPTIONS":
            start_response(_STATUS_TEXT[204],
                           [("Content-Length", "0"), *_CORS_HEADERS])
            return [b""]
        snapshot = engine.snapshot()
        status = 200
        try:
            content_type, body, version = _dispatch(
                engine, snapshot, method, path, environ)
        except _HttpError as exc:
            status, content_type, version = exc.status, _JSON, \
                snapshot.version
            body = _json_bytes({"error": exc.error, "detail": exc.detail})
        except InnotreeError as exc:
            status, slug = _error_slug(exc)
            content_type, version = _JSON, snapshot.version
            body = _json_bytes({"error": slug, "detail": str(exc)})
        headers = [
            ("Content-Type", content_type),
            ("Content-Length", str(len(body))),
            ("X-Snapshot-Version", str(version)),
            *_CORS_HEADERS,
        ]
        start_response(_STATUS_TEXT[status], headers)
        return [body]

    return app


class ThreadingWSGIServer(socketserver.ThreadingMixIn, WSGIServer):
    """One thread per request, so slow readers never block a reload."""

    daemon_threads = True


class _QuietHandler(WSGIRequestHandler):
    def log_message(self, format: str, *args: object) -> None:  # noqa: A002
        pass


def create_server(engine: Engine, host: str = "127.0.0.1",
                  port: int = 8000) -> WSGIServer:
    """A ready-to-serve threaded HTTP server bound to host:port.

    Port 0 binds an ephemeral port; read the actual one from
    ``server.server_address``. Call ``serve_forever()`` to run and
    ``shutdown()`` from another thread to stop.
    """
    return make_server(host, port, make_app(engine),
                       server_class=ThreadingWSGIServer,
                       handler_class=_QuietHandler)

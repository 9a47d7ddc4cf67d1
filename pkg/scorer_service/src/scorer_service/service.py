"""Scorer wire protocol endpoints.

Request: {"pairs": [{"id": ..., "query": ..., "passage": ...}, ...]}
Response: {"scores": [{"id": ..., "score": <float in [0,1]>}, ...]} with
exactly the request ids echoed back. A malformed request produces an
error response with a message, never a crash: HTTP 400 with
{"error": ...} or, on stdio, an {"error": ...} line.

Request handling is serialized per model instance; run several processes
behind one address for parallelism.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, HTTPServer
from typing import TextIO

from .errors import RequestError
from .train import ScoringModel


def validate_request(obj) -> list[tuple[str, str, str]]:
    """Return (id, query, passage) triples or raise RequestError."""
    if not isinstance(obj, dict) or "pairs" not in obj:
        raise RequestError("request must be an object with a 'pairs' field")
    pairs = obj["pairs"]
    if not isinstance(pairs, list):
        raise RequestError("'pairs' must be a list")
    triples = []
    seen: set[str] = set()
    for i, entry in enumerate(pairs):
        if not isinstance(entry, dict):
            raise RequestError(f"pair {i} is not an object")
        for field in ("id", "query", "passage"):
            if not isinstance(entry.get(field), str):
                raise RequestError(f"pair {i} needs a string {field!r}")
        if entry["id"] in seen:
            raise RequestError(f"duplicate pair id {entry['id']!r}")
        seen.add(entry["id"])
        triples.append((entry["id"], entry["query"], entry["passage"]))
    return triples


def handle_request(model: ScoringModel, obj) -> dict:
    triples = validate_request(obj)
    scores = model.score_batch([(q, p) for _, q, p in triples])
    return {
        "scores": [
            {"id": pair_id, "score": score}
            for (pair_id, _, _), score in zip(triples, scores)
        ]
    }


def _error_body(message: str) -> dict:
    return {"error": message}


class _ScorerHandler(BaseHTTPRequestHandler):
    model: ScoringModel  # set by make_http_server

    def _reply(self, status: int, body: dict) -> None:
        payload = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_POST(self) -> None:  # noqa: N802 - http.server naming
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length)
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._reply(400, _error_body("request body is not valid JSON"))
            return
        try:
            self._reply(200, handle_request(self.model, obj))
        except RequestError as exc:
            self._reply(400, _error_body(str(exc)))

    def do_GET(self) -> None:  # noqa: N802 - http.server naming
        self._reply(405, _error_body("POST a scoring request"))

    def log_message(self, format: str, *args) -> None:
        pass


def make_http_server(model: ScoringModel, host: str, port: int) -> HTTPServer:
    """A single-threaded HTTP server; requests are handled one at a time."""
    handler = type("BoundScorerHandler", (_ScorerHandler,), {"model": model})
    return HTTPServer((host, port), handler)


def serve_http(model: ScoringModel, host: str, port: int) -> None:
    server = make_http_server(model, host, port)
    print(f"scoring on http://{host}:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    finally:
        server.server_close()


def serve_stdio(model: ScoringModel, in_stream: TextIO, out_stream: TextIO) -> None:
    """One JSON request per input line, one JSON response line each."""
    for line in in_stream:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            body = _error_body("request line is not valid JSON")
        else:
            try:
                body = handle_request(model, obj)
            except RequestError as exc:
                body = _error_body(str(exc))
        out_stream.write(json.dumps(body) + "\n")
        out_stream.flush()

"""Loopback HTTP facade over the engine.

Powers the interactive elicitation form and scripting: matrix evaluation,
the taxonomy, questionnaire persistence, the loaded weight tables, and the
latest score report. JSON in, JSON out; stateless except questionnaire
writes, which are serialized behind a lock.
"""
from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .ahp import (
    ComparisonMatrix,
    DEFAULT_CR_THRESHOLD,
    Questionnaire,
    WeightTables,
    consistency,
    derive_priorities,
)
from .errors import GridObsError, UnsupportedSizeError
from .report import ReportDocument
from .taxonomy import ComponentKind, QuantityKind, ValidityTag, applicability_tokens

_MAX_BODY = 4 * 1024 * 1024


@dataclass
class ServiceState:
    tables: WeightTables | None = None
    latest_report: ReportDocument | None = None
    questionnaire_dir: Path | None = None
    method: str = "geometric-mean"
    cr_threshold: float = DEFAULT_CR_THRESHOLD
    write_lock: threading.Lock = field(default_factory=threading.Lock)


class _BadRequest(Exception):
    def __init__(self, message, fields=None):
        super().__init__(message)
        self.fields = fields or {}


def evaluate_matrix(state: ServiceState, payload: dict) -> dict:
    if not isinstance(payload, dict):
        raise _BadRequest("body must be a JSON object")
    fields = {}
    items = payload.get("items")
    judgments = payload.get("judgments")
    if not isinstance(items, list) or not all(isinstance(i, str) for i in items):
        fields["items"] = "must be a list of item labels"
    if not isinstance(judgments, list):
        fields["judgments"] = "must be a list of {row, col, value} objects"
    else:
        for k, j in enumerate(judgments):
            if not isinstance(j, dict) or not {"row", "col", "value"} <= set(j):
                fields[f"judgments[{k}]"] = "needs row, col, and value"
                break
    if fields:
        raise _BadRequest("invalid matrix payload", fields)
    try:
        matrix = ComparisonMatrix.from_judgments(
            items, [(j["row"], j["col"], j["value"]) for j in judgments]
        )
        priorities = derive_priorities(matrix, method=state.method)
        report = consistency(matrix, priorities, state.cr_threshold)
    except UnsupportedSizeError as e:
        raise _BadRequest(str(e), {"items": "supported sizes are 2..10"}) from None
    except GridObsError as e:
        raise _BadRequest(str(e), {"judgments": str(e)}) from None
    return {
        "items": list(priorities.items),
        "weights": list(priorities.weights),
        "lambda_max": report.lambda_max,
        "ci": report.consistency_index,
        "cr": report.consistency_ratio,
        "acceptable": report.acceptable,
    }


def store_questionnaire(state: ServiceState, payload: dict) -> dict:
    try:
        q = Questionnaire.from_json(payload)
    except (GridObsError, KeyError, TypeError) as e:
        raise _BadRequest(f"invalid questionnaire: {e}", {"matrices": str(e)}) from None
    if state.questionnaire_dir is None:
        raise _BadRequest("questionnaire persistence is not configured")
    canonical = json.dumps(q.to_json(), sort_keys=True).encode()
    qid = hashlib.sha256(canonical).hexdigest()[:12]
    with state.write_lock:
        state.questionnaire_dir.mkdir(parents=True, exist_ok=True)
        path = state.questionnaire_dir / f"{qid}.json"
        path.write_text(json.dumps(q.to_json(), indent=2) + "\n", encoding="utf-8")
    return {"id": qid, "expert_id": q.expert_id, "contexts": len(q.matrices)}


def taxonomy_payload() -> dict:
    applicability = applicability_tokens()
    return {
        "quantities": [q.name for q in QuantityKind],
        "components": [c.name for c in ComponentKind],
        "tags": {t.value: t.name for t in ValidityTag},
        "applicability": applicability,
        "pair_count": sum(len(v) for v in applicability.values()),
    }


def _make_handler(state: ServiceState):
    class Handler(BaseHTTPRequestHandler):
        server_version = "gridobs"
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _read_json(self):
            length = int(self.headers.get("Content-Length") or 0)
            if length <= 0:
                raise _BadRequest("missing request body")
            if length > _MAX_BODY:
                raise _BadRequest("request body too large")
            raw = self.rfile.read(length)
            try:
                return json.loads(raw)
            except json.JSONDecodeError as e:
                raise _BadRequest(f"malformed JSON: {e}") from None

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            if self.path == "/api/taxonomy":
                self._send(200, taxonomy_payload())
            elif self.path == "/api/tables":
                if state.tables is None:
                    self._send(404, {"error": "no weight tables loaded"})
                else:
                    self._send(200, state.tables.to_json())
            elif self.path == "/api/reports/latest":
                if state.latest_report is None:
                    self._send(404, {"error": "no report available"})
                else:
                    self._send(200, state.latest_report.to_json())
            else:
                self._send(404, {"error": f"unknown route {self.path}"})

        def do_POST(self):
            try:
                if self.path == "/api/matrix/evaluate":
                    self._send(200, evaluate_matrix(state, self._read_json()))
                elif self.path == "/api/questionnaires":
                    self._send(201, store_questionnaire(state, self._read_json()))
                else:
                    self._send(404, {"error": f"unknown route {self.path}"})
            except _BadRequest as e:
                self._send(400, {"error": str(e), "fields": e.fields})

    return Handler


def create_server(state: ServiceState, host: str = "127.0.0.1", port: int = 8321) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), _make_handler(state))


def serve_forever(state: ServiceState, host: str = "127.0.0.1", port: int = 8321) -> None:
    server = create_server(state, host, port)
    try:
        server.serve_forever()
    finally:
        server.server_close()

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"

_acceptance_results = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion, reported in the summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = report.user_properties and dict(report.user_properties).get("acceptance")
    if label:
        _acceptance_results.append((label, report.outcome))


@pytest.fixture(autouse=True)
def _tag_acceptance(request):
    marker = request.node.get_closest_marker("acceptance")
    if marker:
        request.node.user_properties.append(("acceptance", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    grouped = {}
    for label, outcome in _acceptance_results:
        grouped.setdefault(label, []).append(outcome == "passed")
    for label in sorted(grouped):
        oks = grouped[label]
        detail = f" ({sum(oks)}/{len(oks)} cases)" if len(oks) > 1 else ""
        terminalreporter.write_line(f"{'PASS' if all(oks) else 'FAIL'}  {label}{detail}")


class StubScorer:
    """Local stand-in for the remote scoring service.

    ``scores`` maps text -> score (unknown texts get 0.5).  ``mode`` selects
    misbehaviour: "ok", "short" (drops the last score), "status" (replies
    ``status_code``), "slow" (sleeps ``delay`` seconds), "garbage".
    """

    def __init__(self):
        self.scores = {}
        self.mode = "ok"
        self.status_code = 503
        self.delay = 0.0
        self.requests = []
        self.event = threading.Event()

    def handler(self):
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                stub.requests.append(body)
                if self.path != "/score":
                    return self._reply(404, {"error": "not found"})
                texts = body.get("texts", [])
                if stub.mode == "status":
                    return self._reply(stub.status_code, {"error": "boom"})
                if stub.mode == "slow":
                    stub.event.wait(stub.delay)
                if stub.mode == "garbage":
                    return self._reply(200, {"scores": ["high"] * len(texts)})
                scores = [stub.scores.get(t, 0.5) for t in texts]
                if stub.mode == "short":
                    scores = scores[:-1]
                self._reply(200, {"scores": scores})

            def _reply(self, code, payload):
                data = json.dumps(payload).encode()
                try:
                    self.send_response(code)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except (BrokenPipeError, ConnectionResetError):
                    pass

        return Handler


@pytest.fixture
def stub_server():
    stub = StubScorer()
    server = ThreadingHTTPServer(("127.0.0.1", 0), stub.handler())
    server.daemon_threads = True
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    stub.url = f"http://127.0.0.1:{server.server_address[1]}"
    yield stub
    stub.event.set()
    server.shutdown()
    server.server_close()

import json
import threading
import urllib.error
import urllib.request
from http.server import ThreadingHTTPServer

import pytest

from ransomgame.core import make_instance, instance_to_json
from ransomgame.server import Api, make_handler
from ransomgame.strategy import continuation_policy
from ransomgame.core import Reputation


@pytest.fixture(scope="module")
def api_base(tmp_path_factory):
    artifacts = tmp_path_factory.mktemp("artifacts")
    api = Api(seed=13, artifact_dir=str(artifacts))
    server = ThreadingHTTPServer(("127.0.0.1", 0), make_handler(api))
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def call(base, method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(
        base + path, data=data, method=method,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


def canonical_instance():
    return instance_to_json(make_instance(V=500, n=6, total_ransom=800,
                                          decay="linear", sale_ratio=0.7))


def test_solve_endpoint(api_base):
    status, doc = call(api_base, "POST", "/v1/solve",
                       {"instance": canonical_instance(), "reputation": "worst"})
    assert status == 200
    assert doc["policy"]["abort_round"] == 1


def test_solve_schema_violation_reports_field(api_base):
    status, doc = call(api_base, "POST", "/v1/solve", {"instance": {"n": 1}})
    assert status == 400
    assert doc["field"] == "instance"


def test_optimize_endpoint(api_base):
    status, doc = call(api_base, "POST", "/v1/optimize",
                       {"instance": canonical_instance()})
    assert status == 200
    assert doc["expected_profit"] > 0
    assert len(doc["cases"]) == 6


def test_simulate_returns_artifacts(api_base):
    status, doc = call(api_base, "POST", "/v1/simulate",
                       {"rounds": 4, "total_ransom": 400, "victim_count": 3,
                        "value_lo": 100, "value_hi": 200, "seed": 5,
                        "reputation_mode": "worst"})
    assert status == 200
    assert "worst" in doc["summary"]
    url = doc["artifacts"]["victims_csv"]
    req = urllib.request.Request(api_base + url)
    with urllib.request.urlopen(req) as resp:
        assert resp.status == 200
        assert resp.read().startswith(b"victim_id,")


def test_worst_session_recommends_abort(api_base):
    status, doc = call(api_base, "POST", "/v1/sessions",
                       {"instance": canonical_instance(), "reputation": "worst"})
    assert status == 200
    rec = doc["recommendation"]
    assert rec["round"] == 1
    assert rec["recommended"] == "abort"
    assert rec["pay_expected_loss"] > rec["abort_expected_loss"]


def test_perfect_session_pay_flow(api_base):
    status, doc = call(api_base, "POST", "/v1/sessions",
                       {"instance": canonical_instance(),
                        "reputation": "perfect", "seed": 3})
    sid = doc["session_id"]
    status, doc = call(api_base, "POST", f"/v1/sessions/{sid}/decision",
                       {"action": "pay"})
    assert status == 200
    assert doc["history"][0]["event"] == "key_returned_confidential"
    assert doc["current_round"] == 2
    status, doc = call(api_base, "GET", f"/v1/sessions/{sid}")
    assert doc["recommendation"]["round"] == 2


def test_session_replay_determinism(api_base):
    instance = canonical_instance()
    traces = []
    for _ in range(2):
        _, doc = call(api_base, "POST", "/v1/sessions",
                      {"instance": instance, "seed": 42,
                       "reputation": {"beta_r": 0.6, "betas": [0.3] * 6}})
        sid = doc["session_id"]
        events = []
        while doc["alive"]:
            _, doc = call(api_base, "POST", f"/v1/sessions/{sid}/decision",
                          {"action": "pay"})
            events.append(doc["history"][-1]["event"])
        traces.append(events)
    assert traces[0] == traces[1]


def test_decision_after_end_conflicts(api_base):
    _, doc = call(api_base, "POST", "/v1/sessions",
                  {"instance": canonical_instance(), "reputation": "worst",
                   "seed": 1})
    sid = doc["session_id"]
    _, doc = call(api_base, "POST", f"/v1/sessions/{sid}/decision",
                  {"action": "abort"})
    assert not doc["alive"]
    status, doc = call(api_base, "POST", f"/v1/sessions/{sid}/decision",
                       {"action": "pay"})
    assert status == 409


def test_unknown_session_404(api_base):
    status, _ = call(api_base, "GET", "/v1/sessions/zzz")
    assert status == 404


def test_whatif_matches_direct_continuation(api_base):
    inst_doc = canonical_instance()
    _, doc = call(api_base, "POST", "/v1/sessions",
                  {"instance": inst_doc, "reputation": "perfect", "seed": 3})
    sid = doc["session_id"]
    call(api_base, "POST", f"/v1/sessions/{sid}/decision", {"action": "pay"})
    status, doc = call(api_base, "POST", f"/v1/sessions/{sid}/whatif",
                       {"reputation": "perfect"})
    assert status == 200
    inst = make_instance(V=500, n=6, total_ransom=800, decay="linear",
                         sale_ratio=0.7)
    direct = continuation_policy(inst, Reputation.perfect(6), 2)
    got = doc["policy"]
    assert doc["from_round"] == 2
    assert got["abort_round"] == direct.abort_round
    assert got["expected_loss"] == pytest.approx(direct.expected_loss)


def test_openapi_served(api_base):
    status, doc = call(api_base, "GET", "/v1/spec")
    assert status == 200
    assert "/v1/sessions/{id}/decision" in doc["paths"]


def test_unknown_route_404(api_base):
    status, _ = call(api_base, "GET", "/v1/nope")
    assert status == 404


def test_persistence_round_trip(tmp_path):
    api = Api(seed=1)
    inst = make_instance(V=100, n=2, total_ransom=50, decay="linear")
    session = api.sessions.create(inst, Reputation.perfect(2), 7, 1)
    path = tmp_path / "sessions.json"
    api.dump_sessions(str(path))
    fresh = Api(seed=1)
    assert fresh.load_sessions(str(path)) == 1
    restored = fresh.sessions.get(session.session_id)
    assert restored.seed == 7
    assert restored.instance == inst

"""JSON-over-HTTP facade for the solvers, optimizer, simulations, and
interactive decision sessions.

Pure endpoints (/solve, /optimize, /simulate, /whatif) share no state;
sessions live in an in-memory store, each guarded by its own lock so
simultaneous decisions serialize.  Realized events draw from a per-session
seeded stream, which makes decision sequences replayable.
"""

from __future__ import annotations

import json
import logging
import random
import re
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .core import (
    PAY_ALL,
    GameInstance,
    Reputation,
    instance_from_json,
    instance_to_json,
    policy_to_json,
    validate_instance,
)
from .montecarlo import (
    ScenarioConfig,
    compare_scenarios,
    run_scenario,
    write_rounds_csv,
    write_victims_csv,
)
from .reputation import optimal_reputation
from .strategy import continuation_policy, pay_branch_value, victim_policy

log = logging.getLogger("ransomgame.server")


class ApiError(Exception):
    def __init__(self, status: int, message: str, field_path: str | None = None):
        self.status = status
        self.message = message
        self.field_path = field_path
        super().__init__(message)


def _parse_reputation(obj, n: int) -> Reputation:
    if obj == "perfect":
        return Reputation.perfect(n)
    if obj == "worst":
        return Reputation.worst(n)
    if isinstance(obj, dict):
        try:
            rep = Reputation(float(obj["beta_r"]), tuple(float(b) for b in obj["betas"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ApiError(400, f"bad reputation: {exc}", "reputation") from None
    elif isinstance(obj, (list, tuple)):
        vec = [float(b) for b in obj]
        rep = Reputation(vec[0], tuple(vec[1:]))
    else:
        raise ApiError(400, "reputation must be a vector, object, or preset name",
                       "reputation")
    if rep.n != n:
        raise ApiError(400, f"reputation length {rep.n} != rounds {n}", "reputation")
    return rep


def _parse_instance(obj) -> GameInstance:
    if not isinstance(obj, dict):
        raise ApiError(400, "instance must be an object", "instance")
    try:
        inst = instance_from_json(obj)
    except (ValueError, TypeError) as exc:
        raise ApiError(400, str(exc), "instance") from None
    violations = validate_instance(inst)
    if violations:
        raise ApiError(400, "; ".join(violations), "instance")
    return inst


@dataclass
class Session:
    session_id: str
    instance: GameInstance
    reputation: Reputation
    seed: int
    current_round: int = 1
    alive: bool = True
    terminal: str | None = None
    history: list[dict] = field(default_factory=list)
    draws: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def rng_next(self) -> float:
        rng = random.Random(self.seed)
        for _ in range(self.draws):
            rng.random()
        value = rng.random()
        self.draws += 1
        return value

    def recommendation(self) -> dict | None:
        if not self.alive:
            return None
        i = self.current_round
        pay = pay_branch_value(self.instance, self.reputation, i)
        abort = self.instance.losses[i - 1]
        return {
            "round": i,
            "pay_expected_loss": pay,
            "abort_expected_loss": abort,
            "recommended": "pay" if pay < abort else "abort",
        }

    def to_json(self) -> dict:
        return {
            "session_id": self.session_id,
            "instance": instance_to_json(self.instance),
            "reputation": {
                "beta_r": self.reputation.beta_r,
                "betas": list(self.reputation.betas),
            },
            "seed": self.seed,
            "current_round": self.current_round,
            "alive": self.alive,
            "terminal": self.terminal,
            "history": list(self.history),
            "recommendation": self.recommendation(),
        }


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, inst: GameInstance, rep: Reputation, seed: int | None,
               server_seed: int) -> Session:
        with self._lock:
            self._counter += 1
            sid = f"s{self._counter:06d}"
            if seed is None:
                seed = random.Random(f"{server_seed}:{self._counter}").randrange(2**31)
            session = Session(sid, inst, rep, seed)
            self._sessions[sid] = session
            return session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise ApiError(404, f"unknown session {sid}")
        return session

    def all(self) -> list[Session]:
        with self._lock:
            return list(self._sessions.values())

    def restore(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.session_id] = session
            num = int(session.session_id.lstrip("s"))
            self._counter = max(self._counter, num)


def apply_decision(session: Session, action: str) -> dict:
    """Advance the session by one victim decision, sampling the attacker's
    realized move from the reputation model."""
    with session.lock:
        if not session.alive:
            raise ApiError(409, "session already ended")
        if action not in ("pay", "abort"):
            raise ApiError(400, "action must be 'pay' or 'abort'", "action")
        i = session.current_round
        rep = session.reputation
        n = session.instance.n
        if action == "abort":
            event = "aborted_data_sold"
            session.alive = False
            session.terminal = "aborted"
        else:
            if i == 1:
                if session.rng_next() >= rep.beta_r:
                    event = "key_withheld"
                    session.alive = False
                    session.terminal = "key_withheld"
                elif session.rng_next() < rep.betas[0]:
                    event = "key_returned_data_sold"
                    session.alive = False
                    session.terminal = "data_sold"
                else:
                    event = "key_returned_confidential"
            else:
                if session.rng_next() < rep.betas[i - 1]:
                    event = "data_sold"
                    session.alive = False
                    session.terminal = "data_sold"
                else:
                    event = "confidential"
            if session.alive:
                if i == n:
                    session.alive = False
                    session.terminal = "schedule_complete"
                else:
                    session.current_round = i + 1
        session.history.append({"round": i, "decision": action, "event": event})
        return session.to_json()


OPENAPI = {
    "openapi": "3.0.0",
    "info": {"title": "ransomgame API", "version": "1"},
    "paths": {
        "/v1/solve": {"post": {"summary": "Victim best response for an instance and reputation"}},
        "/v1/optimize": {"post": {"summary": "Optimal attacker reputation with per-case table"}},
        "/v1/simulate": {"post": {"summary": "Run a scenario or mode comparison; returns summary plus artifact URLs"}},
        "/v1/sessions": {"post": {"summary": "Create an interactive decision session"}},
        "/v1/sessions/{id}": {"get": {"summary": "Session state with recommendations"}},
        "/v1/sessions/{id}/decision": {"post": {"summary": "Play pay or abort; samples the attacker's realized move"}},
        "/v1/sessions/{id}/whatif": {"post": {"summary": "Recompute the remaining subgame under another reputation"}},
        "/v1/spec": {"get": {"summary": "This description"}},
    },
}


class Api:
    """Route handling, separated from the HTTP plumbing for testability."""

    def __init__(self, seed: int = 0, artifact_dir: str | None = None,
                 ui_dir: str | None = None):
        self.seed = seed
        self.sessions = SessionStore()
        self.artifact_dir = Path(artifact_dir) if artifact_dir else None
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self._run_counter = 0
        self._run_lock = threading.Lock()

    # -- pure endpoints ------------------------------------------------------

    def solve(self, body: dict) -> dict:
        inst = _parse_instance(body.get("instance"))
        rep = _parse_reputation(body.get("reputation", "perfect"), inst.n)
        policy = victim_policy(inst, rep)
        return {"policy": policy_to_json(policy)}

    def optimize(self, body: dict) -> dict:
        inst = _parse_instance(body.get("instance"))
        eps = body.get("epsilon_margin")
        result = optimal_reputation(inst, float(eps) if eps is not None else None)
        return {
            "reputation": {
                "beta_r": result.reputation.beta_r,
                "betas": list(result.reputation.betas),
            },
            "case_index": result.case_index,
            "expected_profit": result.expected_profit,
            "fallback": result.fallback,
            "epsilon_margin": result.epsilon_margin,
            "policy": policy_to_json(result.policy),
            "cases": [
                {
                    "case": c.case_index,
                    "status": c.status,
                    "lp_value": None if c.x is None else c.lp_value,
                    "beta_r": None if c.reputation is None else c.reputation.beta_r,
                    "betas": None if c.reputation is None else list(c.reputation.betas),
                    "tree_profit": c.tree_profit,
                    "induced_abort_round": "pay_all"
                    if c.status == "OPTIMAL" and c.induced_abort_round is PAY_ALL
                    else c.induced_abort_round,
                }
                for c in result.cases
            ],
        }

    def simulate(self, body: dict) -> dict:
        try:
            cfg = ScenarioConfig.from_json(body)
        except (TypeError, ValueError) as exc:
            raise ApiError(400, str(exc), "scenario") from None
        modes = body.get("modes")
        threads = int(body.get("threads", 1))
        if modes:
            comparison = compare_scenarios(cfg, list(modes), threads)
            results = comparison.results
        else:
            results = {cfg.reputation_mode: run_scenario(cfg, threads)}
        summary = {
            mode: {
                "total_profit": res.total_profit,
                "mean_profit": res.mean_profit,
                "total_loss": res.total_loss,
                "per_round_cumulative": list(res.per_round_cumulative),
            }
            for mode, res in results.items()
        }
        artifacts = {}
        if self.artifact_dir is not None:
            with self._run_lock:
                self._run_counter += 1
                run_id = f"run{self._run_counter:04d}"
            run_dir = self.artifact_dir / run_id
            run_dir.mkdir(parents=True, exist_ok=True)
            ordered = [results[m] for m in sorted(results)]
            write_victims_csv(str(run_dir / "victims.csv"), ordered)
            write_rounds_csv(str(run_dir / "rounds.csv"), ordered)
            artifacts = {
                "victims_csv": f"/artifacts/{run_id}/victims.csv",
                "rounds_csv": f"/artifacts/{run_id}/rounds.csv",
            }
        return {"summary": summary, "artifacts": artifacts}

    # -- sessions ------------------------------------------------------------

    def create_session(self, body: dict) -> dict:
        inst = _parse_instance(body.get("instance"))
        rep = _parse_reputation(body.get("reputation", "perfect"), inst.n)
        seed = body.get("seed")
        session = self.sessions.create(
            inst, rep, int(seed) if seed is not None else None, self.seed
        )
        return session.to_json()

    def whatif(self, sid: str, body: dict) -> dict:
        session = self.sessions.get(sid)
        rep = _parse_reputation(body.get("reputation"), session.instance.n)
        with session.lock:
            start = session.current_round
        policy = continuation_policy(session.instance, rep, start)
        return {"from_round": start, "policy": policy_to_json(policy)}

    # -- persistence ---------------------------------------------------------

    def dump_sessions(self, path: str) -> None:
        payload = []
        for s in self.sessions.all():
            with s.lock:
                payload.append(
                    {
                        "session_id": s.session_id,
                        "instance": instance_to_json(s.instance),
                        "beta_r": s.reputation.beta_r,
                        "betas": list(s.reputation.betas),
                        "seed": s.seed,
                        "current_round": s.current_round,
                        "alive": s.alive,
                        "terminal": s.terminal,
                        "history": list(s.history),
                        "draws": s.draws,
                    }
                )
        Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")

    def load_sessions(self, path: str) -> int:
        if not Path(path).exists():
            return 0
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        for row in payload:
            session = Session(
                session_id=row["session_id"],
                instance=instance_from_json(row["instance"]),
                reputation=Reputation(row["beta_r"], tuple(row["betas"])),
                seed=row["seed"],
                current_round=row["current_round"],
                alive=row["alive"],
                terminal=row["terminal"],
                history=list(row["history"]),
                draws=row["draws"],
            )
            self.sessions.restore(session)
        return len(payload)


def make_handler(api: Api):
    routes = [
        ("POST", re.compile(r"^/v1/solve$"), lambda m, b: api.solve(b)),
        ("POST", re.compile(r"^/v1/optimize$"), lambda m, b: api.optimize(b)),
        ("POST", re.compile(r"^/v1/simulate$"), lambda m, b: api.simulate(b)),
        ("POST", re.compile(r"^/v1/sessions$"), lambda m, b: api.create_session(b)),
        ("GET", re.compile(r"^/v1/sessions/(?P<sid>[^/]+)$"),
         lambda m, b: api.sessions.get(m["sid"]).to_json()),
        ("POST", re.compile(r"^/v1/sessions/(?P<sid>[^/]+)/decision$"),
         lambda m, b: apply_decision(api.sessions.get(m["sid"]), b.get("action", ""))),
        ("POST", re.compile(r"^/v1/sessions/(?P<sid>[^/]+)/whatif$"),
         lambda m, b: api.whatif(m["sid"], b)),
        ("GET", re.compile(r"^/v1/spec$"), lambda m, b: OPENAPI),
    ]

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            log.debug("%s " + fmt, self.address_string(), *args)

        def _send(self, status: int, payload: dict) -> None:
            raw = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(raw)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(raw)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()

        def _serve_file(self, base: Path, rel: str, content_type: str | None = None):
            target = (base / rel).resolve()
            if not str(target).startswith(str(base.resolve())) or not target.is_file():
                self._send(404, {"error": "not found"})
                return
            raw = target.read_bytes()
            ctype = content_type or {
                ".html": "text/html", ".js": "text/javascript",
                ".css": "text/css", ".csv": "text/csv",
                ".json": "application/json", ".map": "application/json",
            }.get(target.suffix, "application/octet-stream")
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(raw)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(raw)

        def _dispatch(self, method: str):
            body = {}
            if method == "POST":
                length = int(self.headers.get("Content-Length") or 0)
                raw = self.rfile.read(length) if length else b"{}"
                try:
                    body = json.loads(raw or b"{}")
                except json.JSONDecodeError as exc:
                    self._send(400, {"error": f"bad JSON body: {exc}"})
                    return
            if method == "GET" and self.path.startswith("/artifacts/"):
                if api.artifact_dir is None:
                    self._send(404, {"error": "artifacts disabled"})
                else:
                    self._serve_file(api.artifact_dir, self.path[len("/artifacts/"):])
                return
            if method == "GET" and (self.path == "/ui" or self.path.startswith("/ui/")):
                if api.ui_dir is None:
                    self._send(404, {"error": "no UI bundled"})
                else:
                    rel = self.path[len("/ui"):].lstrip("/") or "index.html"
                    self._serve_file(api.ui_dir, rel)
                return
            for m, pattern, fn in routes:
                if m != method:
                    continue
                match = pattern.match(self.path)
                if match:
                    try:
                        self._send(200, fn(match.groupdict(), body))
                    except ApiError as exc:
                        payload = {"error": exc.message}
                        if exc.field_path:
                            payload["field"] = exc.field_path
                        self._send(exc.status, payload)
                    except Exception as exc:  # internal errors stay JSON
                        log.exception("internal error on %s", self.path)
                        self._send(500, {"error": f"internal: {exc}"})
                    return
            self._send(404, {"error": f"no route {method} {self.path}"})

        def do_GET(self):
            self._dispatch("GET")

        def do_POST(self):
            self._dispatch("POST")

    return Handler


def serve(host: str = "127.0.0.1", port: int = 8089, seed: int = 0,
          persist: str | None = None, artifact_dir: str | None = None,
          ui_dir: str | None = None) -> None:
    api = Api(seed=seed, artifact_dir=artifact_dir, ui_dir=ui_dir)
    if persist:
        restored = api.load_sessions(persist)
        if restored:
            log.info("restored %d sessions from %s", restored, persist)
    server = ThreadingHTTPServer((host, port), make_handler(api))
    print(f"serving on http://{host}:{server.server_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        if persist:
            api.dump_sessions(persist)
            log.info("persisted sessions to %s", persist)
        server.server_close()

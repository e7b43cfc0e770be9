"""Session-oriented HTTP game service for live human-vs-agent play.

One human seat per session; the other seats run configured agents that
move synchronously inside each mutation. Clients poll the version
counter and re-fetch their seat view; the server is the only legality
authority and never puts another seat's cards in a response. Completed
games append to a JSON-lines record log under the data directory, so
finished records survive restarts (in-flight sessions do not).

Endpoint paths and payloads are frozen in docs/api.md.
"""

from __future__ import annotations

import json
import random
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .cards import CardError, classify, format_cards, parse_cards
from .engine import (
    GameState,
    IllegalMove,
    Seat,
    SEATS,
    apply_move,
    deal,
    export_record,
    observe,
    record_from_json,
    record_to_json,
)
from .movegen import PASS, is_pass
from .arena import AGENT_KINDS, Agent, make_agent


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class Session:
    def __init__(self, sid: str, human_seat: Seat, agents: dict[Seat, Agent], seed: int | None):
        self.id = sid
        self.human_seat = human_seat
        self.agents = agents
        self.rng = random.Random(seed)
        self.state: GameState = deal(self.rng)
        self.initial_hands = dict(self.state.hands)
        self.version = 0
        self.lock = threading.Lock()
        self.persisted = False

    def advance_agents(self) -> None:
        """Let agent seats play until the human is to act or the game ends."""
        while not self.state.is_terminal() and self.state.to_act is not self.human_seat:
            seat = self.state.to_act
            move = self.agents[seat].act(observe(self.state, seat), self.rng)
            self.state = apply_move(self.state, move)
            self.version += 1


class RecordStore:
    """Append-only JSON-lines log of completed games."""

    def __init__(self, data_dir: str):
        self.path = Path(data_dir) / "records.jsonl"
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.lock = threading.Lock()

    def append(self, line: str) -> int:
        with self.lock:
            with open(self.path, "a") as f:
                f.write(line + "\n")
            return sum(1 for _ in open(self.path)) - 1

    def lines(self) -> list[str]:
        if not self.path.exists():
            return []
        return [ln for ln in self.path.read_text().splitlines() if ln.strip()]


def _seat(value: str) -> Seat:
    try:
        return Seat(value)
    except ValueError:
        raise ServiceError(400, "invalid-config", f"unknown seat {value!r}") from None


def _view(session: Session, seat: Seat) -> dict:
    obs = observe(session.state, seat)
    legal = []
    if not session.state.is_terminal() and session.state.to_act is seat:
        legal = ["pass" if is_pass(m) else format_cards(m.cards) for m in obs.legal_moves()]
    return {
        "session_id": session.id,
        "seat": seat.value,
        "version": session.version,
        "hand": format_cards(obs.own_hand),
        "hand_sizes": {s.value: n for s, n in obs.hand_sizes.items()},
        "incumbent": (
            {"seat": obs.incumbent[0].value, "cards": format_cards(obs.incumbent[1].cards)}
            if obs.incumbent else None
        ),
        "history": [
            {"seat": s.value, "move": "pass" if is_pass(m) else format_cards(m.cards)}
            for s, m in obs.full_history
        ],
        "to_act": session.state.to_act.value,
        "winner": session.state.winner.value if session.state.winner else None,
        "your_turn": not session.state.is_terminal() and session.state.to_act is seat,
        "legal_moves": legal,
    }


def create_app(data_dir: str = "./data", checkpoint: str | None = None,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="doudizhu service")
    sessions: dict[str, Session] = {}
    store = RecordStore(data_dir)

    @app.exception_handler(ServiceError)
    async def on_service_error(request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status,
                            content={"error": {"code": exc.code, "message": exc.message}})

    def get_session(sid: str) -> Session:
        session = sessions.get(sid)
        if session is None:
            raise ServiceError(404, "not-found", f"no session {sid}")
        return session

    def require_human(session: Session, seat_value: str) -> Seat:
        seat = _seat(seat_value)
        if seat is not session.human_seat:
            raise ServiceError(403, "forbidden", f"{seat.value} is not the human seat")
        return seat

    def persist_if_finished(session: Session) -> None:
        if session.state.is_terminal() and not session.persisted:
            record = export_record(session.state, session.initial_hands)
            store.append(record_to_json(record))
            session.persisted = True

    @app.get("/api/health")
    async def health():
        return {"status": "ok", "sessions": len(sessions)}

    @app.post("/api/sessions")
    async def create_session(body: dict):
        human_seat = _seat(body.get("human_seat", "landlord"))
        agent_spec = body.get("agents", {})
        agents: dict[Seat, Agent] = {}
        for seat in SEATS:
            if seat is human_seat:
                continue
            kind = agent_spec.get(seat.value, "rhcp")
            if kind not in AGENT_KINDS:
                raise ServiceError(400, "invalid-config", f"unknown agent kind {kind!r}")
            try:
                agents[seat] = make_agent(kind, checkpoint)
            except ValueError as e:
                raise ServiceError(400, "invalid-config", str(e)) from None
        seed = body.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise ServiceError(400, "invalid-config", "seed must be an integer")
        session = Session(uuid.uuid4().hex[:12], human_seat, agents, seed)
        sessions[session.id] = session
        with session.lock:
            session.advance_agents()
            persist_if_finished(session)
        return {"session_id": session.id, "view": _view(session, human_seat)}

    @app.get("/api/sessions/{sid}/view")
    async def get_view(sid: str, seat: str):
        session = get_session(sid)
        return {"view": _view(session, require_human(session, seat))}

    @app.get("/api/sessions/{sid}/version")
    async def get_version(sid: str):
        session = get_session(sid)
        return {
            "version": session.version,
            "to_act": session.state.to_act.value,
            "finished": session.state.is_terminal(),
        }

    @app.post("/api/sessions/{sid}/moves")
    async def post_move(sid: str, body: dict):
        session = get_session(sid)
        seat = require_human(session, body.get("seat", ""))
        with session.lock:
            if "version" in body and body["version"] != session.version:
                raise ServiceError(409, "stale-version",
                                   f"view version {body['version']} is stale (now {session.version})")
            if session.state.is_terminal():
                raise ServiceError(409, "not-your-turn", "game is over")
            if session.state.to_act is not seat:
                raise ServiceError(409, "not-your-turn", f"{session.state.to_act.value} is to act")
            cards_text = body.get("cards", "")
            if cards_text == "pass":
                move = PASS
            else:
                try:
                    move = classify(parse_cards(cards_text))
                except CardError as e:
                    raise ServiceError(409, "bad-cards", str(e)) from None
                if move is None or is_pass(move):
                    raise ServiceError(409, "bad-cards", f"{cards_text!r} is not a playable group")
            try:
                session.state = apply_move(session.state, move)
            except IllegalMove as e:
                raise ServiceError(409, e.reason, str(e)) from None
            session.version += 1
            session.advance_agents()
            persist_if_finished(session)
        return {"view": _view(session, seat)}

    @app.get("/api/records")
    async def list_records():
        out = []
        for i, line in enumerate(store.lines()):
            obj = json.loads(line)
            out.append({"id": i, "winner": obj.get("winner"), "moves": len(obj.get("moves", []))})
        return {"records": out}

    @app.get("/api/records/{rid}")
    async def get_record(rid: int):
        lines = store.lines()
        if rid < 0 or rid >= len(lines):
            raise ServiceError(404, "not-found", f"no record {rid}")
        record_from_json(lines[rid])  # validate before serving
        return JSONResponse(content=json.loads(lines[rid]))

    static = Path(static_dir) if static_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if static.is_dir():
        app.mount("/assets", StaticFiles(directory=str(static)), name="assets")

        @app.get("/")
        async def index():
            return FileResponse(str(static / "index.html"))

    return app

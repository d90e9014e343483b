"""HTTP session service: draft sessions, recommendations, trades, projection."""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException

from ..draft import (
    Action,
    DraftState,
    IllegalActionError,
    apply_action,
    new_draft,
    optimize_trades,
    recommend,
)
from ..errors import DataError
from ..roster import PlayerHistory
from ..space import SimilaritySpace
from ..winmodel import WinModel
from . import schemas


@dataclass
class ServiceContext:
    space: SimilaritySpace
    model: WinModel
    histories: dict[str, PlayerHistory]
    catalog_ids: list[str]


@dataclass
class _Session:
    state: DraftState
    seq: int = 0
    log: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _state_response(session_id: str, session: _Session) -> schemas.SessionStateResponse:
    state = session.state
    acting = None
    if state.phase == "Pick":
        team, slot = state.acting_turn()
        acting = schemas.TurnInfo(team=team, slot=slot, player_id=state.rosters[team][slot])
    return schemas.SessionStateResponse(
        session_id=session_id,
        seq=session.seq,
        phase=state.phase,
        pool=sorted(state.pool),
        bans={t: list(state.bans[t]) for t in ("A", "B")},
        picks={t: {str(s): c for s, c in sorted(state.picks[t].items())} for t in ("A", "B")},
        pick_sequence=[[t, s] for t, s in state.pick_sequence],
        rosters={t: list(state.rosters[t]) for t in ("A", "B")},
        sides=dict(state.sides),
        acting=acting,
    )


def create_app(context: ServiceContext) -> FastAPI:
    app = FastAPI(title="draftlab", version="0.1.0")
    sessions: dict[str, _Session] = {}

    def _session(session_id: str) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(sessions=len(sessions))

    @app.get("/projection", response_model=schemas.ProjectionResponse)
    def projection():
        space = context.space
        return schemas.ProjectionResponse(
            clusters=space.clusters,
            champions=[
                schemas.ProjectionChampion(
                    champion_id=cid,
                    x=float(space.mds_xy[i, 0]),
                    y=float(space.mds_xy[i, 1]),
                    cluster=int(space.cluster[i]),
                )
                for i, cid in enumerate(space.champion_ids)
            ],
        )

    @app.post("/sessions", response_model=schemas.SessionStateResponse, status_code=201)
    def create_session(request: schemas.CreateSessionRequest):
        try:
            rosters = {
                team: [_history(pid) for pid in request.players[team]] for team in ("A", "B")
            }
            state = new_draft(
                request.pool or context.catalog_ids,
                rosters,
                request.sides,
                seed=request.seed,
                pick_order=request.pick_order,
            )
        except (DataError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session_id = uuid.uuid4().hex[:12]
        sessions[session_id] = _Session(state=state)
        return _state_response(session_id, sessions[session_id])

    def _history(player_id: str) -> PlayerHistory:
        history = context.histories.get(player_id)
        if history is None:
            raise DataError(f"no history for player {player_id!r}")
        return history

    @app.get("/sessions/{session_id}", response_model=schemas.SessionStateResponse)
    def get_session(session_id: str):
        return _state_response(session_id, _session(session_id))

    @app.post("/sessions/{session_id}/actions", response_model=schemas.SessionStateResponse)
    def submit_action(session_id: str, request: schemas.ActionRequest):
        session = _session(session_id)
        with session.lock:
            if request.seq != session.seq:
                raise HTTPException(
                    status_code=409,
                    detail=f"stale sequence number {request.seq}, current is {session.seq}",
                )
            action = Action.from_dict(request.action.model_dump(exclude_none=True))
            try:
                new_state = apply_action(session.state, action)
            except IllegalActionError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            session.state = new_state
            session.seq += 1
            session.log.append(
                schemas.ActionLogEntry(
                    session_id=session_id,
                    seq=session.seq,
                    actor=action.team or "system",
                    action=request.action,
                    timestamp=time.time(),
                )
            )
            return _state_response(session_id, session)

    @app.get("/sessions/{session_id}/recommendations", response_model=schemas.RecommendationResponse)
    def get_recommendations(session_id: str, top_n: int = 5):
        session = _session(session_id)
        try:
            result = recommend(session.state, context.model, context.space, top_n=top_n)
        except IllegalActionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.RecommendationResponse(
            session_id=session_id,
            seq=session.seq,
            candidates=[schemas.CandidateModel(**c.__dict__) for c in result.candidates],
        )

    @app.get("/sessions/{session_id}/trades", response_model=schemas.TradeResponse)
    def get_trades(session_id: str, team: str):
        session = _session(session_id)
        if team not in ("A", "B"):
            raise HTTPException(status_code=422, detail=f"unknown team {team!r}")
        try:
            assignment, gain = optimize_trades(session.state, context.space, team)
        except IllegalActionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.TradeResponse(
            session_id=session_id,
            seq=session.seq,
            team=team,
            assignment={str(s): c for s, c in assignment.items()},
            mean_proficiency_gain=gain,
        )

    @app.get("/sessions/{session_id}/log", response_model=schemas.ActionLogResponse)
    def get_log(session_id: str):
        session = _session(session_id)
        return schemas.ActionLogResponse(session_id=session_id, entries=list(session.log))

    return app

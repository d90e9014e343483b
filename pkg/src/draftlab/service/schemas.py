"""Pydantic request/response models for the draft session service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class CreateSessionRequest(BaseModel):
    players: dict[str, list[str]]  # team ("A"/"B") -> 5 player ids
    sides: dict[str, str]  # team -> "Top" | "Bottom"
    seed: int = 0
    pick_order: str = "snake"
    pool: list[str] | None = None  # default: the full loaded catalog


class ActionModel(BaseModel):
    kind: str
    team: str | None = None
    champion: str | None = None
    slot_a: int | None = None
    slot_b: int | None = None


class ActionRequest(BaseModel):
    seq: int
    action: ActionModel


class TurnInfo(BaseModel):
    team: str
    slot: int
    player_id: str


class SessionStateResponse(BaseModel):
    session_id: str
    seq: int
    phase: str
    pool: list[str]
    bans: dict[str, list[str]]
    picks: dict[str, dict[str, str]]  # team -> slot (as string) -> champion
    pick_sequence: list[list]
    rosters: dict[str, list[str]]
    sides: dict[str, str]
    acting: TurnInfo | None = None


class CandidateModel(BaseModel):
    champion_id: str
    win_probability: float
    proficiency_component: float
    congruency_after: int
    diversity_after: float
    explanation: str


class RecommendationResponse(BaseModel):
    session_id: str
    seq: int
    candidates: list[CandidateModel]


class TradeResponse(BaseModel):
    session_id: str
    seq: int
    team: str
    assignment: dict[str, str]  # slot (as string) -> champion
    mean_proficiency_gain: float


class ProjectionChampion(BaseModel):
    champion_id: str
    x: float
    y: float
    cluster: int


class ProjectionResponse(BaseModel):
    clusters: int
    champions: list[ProjectionChampion]


class ActionLogEntry(BaseModel):
    session_id: str
    seq: int
    actor: str
    action: ActionModel
    timestamp: float


class ActionLogResponse(BaseModel):
    session_id: str
    entries: list[ActionLogEntry]


class HealthResponse(BaseModel):
    status: str = Field(default="ok")
    sessions: int

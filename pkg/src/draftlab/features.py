"""Match records and the per-team feature vector used for win-loss classification."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations

from .errors import DataError, UnusableHistoryError
from .roster import REGIONS, SINGLE_DIVISION_TIERS, TIERS, PlayerHistory, generality, most_picked
from .space import SimilaritySpace

TEAM_SIZE = 5
SIDES = ("Top", "Bottom")
OUTCOMES = ("Win", "Loss")

# Fixed export/model column order: individual, team composition, team assignment.
FEATURE_ORDER = (
    "mean_proficiency",
    "mean_generality",
    "congruency",
    "diversity",
    "min_champ_distance",
    "max_champ_distance",
    "starting_bottom",
    "background_diversity",
    "min_background_diversity",
    "max_background_diversity",
)


@dataclass(frozen=True)
class Slot:
    player_id: str
    champion_id: str
    pick_index: int  # 1..5 within-team pick order


@dataclass(frozen=True)
class TeamRecord:
    side: str
    slots: tuple[Slot, ...]
    outcome: str

    def __post_init__(self):
        if self.side not in SIDES:
            raise DataError(f"unknown side {self.side!r}")
        if self.outcome not in OUTCOMES:
            raise DataError(f"unknown outcome {self.outcome!r}")
        if len(self.slots) != TEAM_SIZE:
            raise DataError(f"team has {len(self.slots)} slots, expected {TEAM_SIZE}")
        if len({s.player_id for s in self.slots}) != TEAM_SIZE:
            raise DataError("duplicate players on one team")
        if len({s.champion_id for s in self.slots}) != TEAM_SIZE:
            raise DataError("duplicate champions on one team")
        if sorted(s.pick_index for s in self.slots) != list(range(1, TEAM_SIZE + 1)):
            raise DataError("pick indices must be a permutation of 1..5")

    @property
    def champion_ids(self) -> list[str]:
        return [s.champion_id for s in self.slots]


@dataclass(frozen=True)
class MatchRecord:
    match_id: str
    region: str
    tier: str
    division: int
    teams: tuple[TeamRecord, TeamRecord]

    def __post_init__(self):
        if self.region not in REGIONS:
            raise DataError(f"unknown region {self.region!r}")
        if self.tier not in TIERS:
            raise DataError(f"unknown tier {self.tier!r}")
        expected_max = 1 if self.tier in SINGLE_DIVISION_TIERS else 5
        if not (1 <= self.division <= expected_max):
            raise DataError(f"division {self.division} invalid for tier {self.tier}")
        a, b = self.teams
        if {a.side, b.side} != set(SIDES):
            raise DataError("teams must occupy opposite sides")
        if {a.outcome, b.outcome} != set(OUTCOMES):
            raise DataError("exactly one team must win")
        champs = a.champion_ids + b.champion_ids
        if len(set(champs)) != 2 * TEAM_SIZE:
            raise DataError("the 10 champions across both teams must be distinct")

    def team(self, side: str) -> TeamRecord:
        for team in self.teams:
            if team.side == side:
                return team
        raise DataError(f"no team on side {side!r}")

    def to_dict(self) -> dict:
        return {
            "match_id": self.match_id,
            "region": self.region,
            "tier": self.tier,
            "division": self.division,
            "teams": [
                {
                    "side": t.side,
                    "outcome": t.outcome,
                    "slots": [
                        {"player_id": s.player_id, "champion_id": s.champion_id, "pick_index": s.pick_index}
                        for s in t.slots
                    ],
                }
                for t in self.teams
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MatchRecord":
        try:
            teams = tuple(
                TeamRecord(
                    side=t["side"],
                    outcome=t["outcome"],
                    slots=tuple(Slot(s["player_id"], s["champion_id"], s["pick_index"]) for s in t["slots"]),
                )
                for t in payload["teams"]
            )
            return cls(payload["match_id"], payload["region"], payload["tier"], payload["division"], teams)
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed match record: {exc}") from exc


@dataclass(frozen=True)
class TeamFeatureVector:
    mean_proficiency: float
    mean_generality: float
    congruency: int
    diversity: float
    min_champ_distance: float
    max_champ_distance: float
    starting_bottom: int
    background_diversity: float
    min_background_diversity: float
    max_background_diversity: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(float(getattr(self, name)) for name in FEATURE_ORDER)


def proficiency(space: SimilaritySpace, history: PlayerHistory, champion: str) -> float:
    """Cosine similarity between the player's most-picked champion and the selected one."""
    favorite = most_picked(history)
    return 1.0 - float(space.dist[space.index(favorite), space.index(champion)])


def congruency(space: SimilaritySpace, champions) -> int:
    """Number of distinct functional clusters covered by the five selected champions."""
    return len({int(space.cluster[space.index(c)]) for c in champions})


def diversity(space: SimilaritySpace, champions) -> tuple[float, float, float]:
    """Mean, min, max of the 10 pairwise cosine distances within the team."""
    idx = [space.index(c) for c in champions]
    dists = [float(space.dist[i, j]) for i, j in combinations(idx, 2)]
    return sum(dists) / len(dists), min(dists), max(dists)


def background_diversity(space: SimilaritySpace, histories) -> tuple[float, float, float]:
    """Diversity over the players' most-picked champions instead of their current picks."""
    idx = [space.index(most_picked(h)) for h in histories]
    dists = [float(space.dist[i, j]) for i, j in combinations(idx, 2)]
    return sum(dists) / len(dists), min(dists), max(dists)


def vector_from_team(
    space: SimilaritySpace,
    champions,
    histories,
    side: str,
) -> TeamFeatureVector:
    """Feature vector for an explicit (champions, slot histories, side) triple."""
    profs = [proficiency(space, h, c) for h, c in zip(histories, champions)]
    gens = [generality(h) for h in histories]
    div_mean, div_min, div_max = diversity(space, champions)
    bd_mean, bd_min, bd_max = background_diversity(space, histories)
    return TeamFeatureVector(
        mean_proficiency=sum(profs) / TEAM_SIZE,
        mean_generality=sum(gens) / TEAM_SIZE,
        congruency=congruency(space, champions),
        diversity=div_mean,
        min_champ_distance=div_min,
        max_champ_distance=div_max,
        starting_bottom=1 if side == "Bottom" else 0,
        background_diversity=bd_mean,
        min_background_diversity=bd_min,
        max_background_diversity=bd_max,
    )


def team_features(
    space: SimilaritySpace,
    match: MatchRecord,
    side: str,
    histories: dict[str, PlayerHistory],
) -> TeamFeatureVector:
    """Assemble the full feature vector for one team of a match."""
    team = match.team(side)
    slot_histories = []
    for slot in team.slots:
        history = histories.get(slot.player_id)
        if history is None or not history.usable:
            raise UnusableHistoryError(
                f"match {match.match_id} slot {slot.player_id}: missing or unusable history"
            )
        slot_histories.append(history)
    return vector_from_team(space, team.champion_ids, slot_histories, side)


def export_feature_matrix(rows, path) -> None:
    """Write (match_id, side, outcome, features...) rows as CSV in FEATURE_ORDER."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["match_id", "tier", "division", "side", "outcome"] + list(FEATURE_ORDER))
        for match_id, tier, division, side, outcome, vector in rows:
            writer.writerow([match_id, tier, division, side, outcome] + [repr(v) for v in vector.as_tuple()])

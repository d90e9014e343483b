"""Per-player champion-selection histories and history-only player metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .errors import DataError, UnusableHistoryError

REGIONS = ("KR", "NA", "EUW", "SYN")
TIERS = ("Bronze", "Silver", "Gold", "Platinum", "Diamond", "Master", "Challenger")
SINGLE_DIVISION_TIERS = ("Master", "Challenger")


@dataclass(frozen=True)
class PlayerHistory:
    """Immutable pick-count summary for one player."""

    player_id: str
    region: str
    tier: str
    division: int
    picks: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.region not in REGIONS:
            raise DataError(f"unknown region {self.region!r}")
        if self.tier not in TIERS:
            raise DataError(f"unknown tier {self.tier!r}")
        expected_max = 1 if self.tier in SINGLE_DIVISION_TIERS else 5
        if not (1 <= self.division <= expected_max):
            raise DataError(f"division {self.division} invalid for tier {self.tier}")
        if any(c < 1 for c in self.picks.values()):
            raise DataError("pick counts must be >= 1")

    @property
    def total(self) -> int:
        return sum(self.picks.values())

    @property
    def usable(self) -> bool:
        return self.total >= 1


def build_history(matches: Iterable, player_id: str, window: int | None = None) -> PlayerHistory:
    """Aggregate a player's pick counts from a stream of MatchRecords.

    Tier/division/region are copied from the most recent match containing the
    player. ``window`` keeps only the latest N appearances (default: all).
    An empty stream yields an unusable history with placeholder rank info.
    """
    appearances = []  # (champion_id, region, tier, division) in stream order
    for match in matches:
        for team in match.teams:
            for slot in team.slots:
                if slot.player_id == player_id:
                    appearances.append((slot.champion_id, match.region, match.tier, match.division))
    if window is not None:
        appearances = appearances[-window:]
    if not appearances:
        return PlayerHistory(player_id, "SYN", "Bronze", 1, {})
    picks: dict[str, int] = {}
    for champ, *_ in appearances:
        picks[champ] = picks.get(champ, 0) + 1
    _, region, tier, division = appearances[-1]
    return PlayerHistory(player_id, region, tier, division, picks)


def most_picked(history: PlayerHistory) -> str:
    """The player's most-picked champion; ties break to the lexicographically smallest id."""
    if not history.usable:
        raise UnusableHistoryError(f"player {history.player_id} has no recorded picks")
    return min(history.picks, key=lambda c: (-history.picks[c], c))


def generality(history: PlayerHistory) -> float:
    """Shannon entropy (natural log) of the player's champion selection distribution."""
    if not history.usable:
        raise UnusableHistoryError(f"player {history.player_id} has no recorded picks")
    total = history.total
    return -sum((c / total) * math.log(c / total) for c in history.picks.values())

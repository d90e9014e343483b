"""Champion-select state machine: bans, randomized pick order, trades, recommendations."""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations, permutations

import numpy as np

from .errors import DataError, IllegalActionError
from .features import vector_from_team
from .roster import PlayerHistory, most_picked
from .space import SimilaritySpace
from .winmodel import WinModel, predict

TEAMS = ("A", "B")
PHASES = ("Ban", "Pick", "Trade", "Complete")
BANS_PER_TEAM = 3


@dataclass(frozen=True)
class Action:
    kind: str  # "ban" | "pick" | "swap" | "finalize"
    team: str | None = None
    champion: str | None = None
    slot_a: int | None = None
    slot_b: int | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for key in ("team", "champion", "slot_a", "slot_b"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "Action":
        return cls(
            kind=payload["kind"],
            team=payload.get("team"),
            champion=payload.get("champion"),
            slot_a=payload.get("slot_a"),
            slot_b=payload.get("slot_b"),
        )


@dataclass(frozen=True)
class Candidate:
    champion_id: str
    win_probability: float
    proficiency_component: float
    congruency_after: int
    diversity_after: float
    explanation: str


@dataclass(frozen=True)
class Recommendation:
    candidates: tuple[Candidate, ...]


@dataclass(frozen=True)
class DraftState:
    """Immutable draft snapshot; apply_action returns a new state."""

    phase: str
    pool: frozenset
    bans: dict  # team -> tuple of champion ids
    ban_sequence: tuple  # team order for bans
    pick_sequence: tuple  # ordered (team, slot) turns
    picks: dict  # team -> {slot: champion_id}
    rosters: dict  # team -> tuple of player ids, slot order
    histories: dict  # player_id -> PlayerHistory
    sides: dict  # team -> "Top" | "Bottom"
    turn_cursor: int  # index into pick_sequence (Pick phase)
    ban_cursor: int  # index into ban_sequence (Ban phase)

    def acting_turn(self) -> tuple[str, int]:
        if self.phase != "Pick":
            raise IllegalActionError(f"no pick turn in phase {self.phase}")
        return self.pick_sequence[self.turn_cursor]

    def pick_indices(self, team: str) -> dict[int, int]:
        """slot -> within-team pick position (1..5) from the pick sequence."""
        out, position = {}, 0
        for t, slot in self.pick_sequence:
            if t == team:
                position += 1
                out[slot] = position
        return out

    def check_invariants(self) -> None:
        placed = []
        for team in TEAMS:
            placed.extend(self.bans[team])
            placed.extend(self.picks[team].values())
        if len(placed) != len(set(placed)):
            raise DataError("a champion appears in two places")
        if any(c in self.pool for c in placed):
            raise DataError("banned or picked champion still in pool")
        for team in TEAMS:
            if len(self.bans[team]) > BANS_PER_TEAM:
                raise DataError("too many bans")
            if len(self.picks[team]) > 5:
                raise DataError("too many picks")


def new_draft(
    catalog_ids,
    rosters: dict[str, list[PlayerHistory]],
    sides: dict[str, str],
    seed: int = 0,
    pick_order: str = "snake",
) -> DraftState:
    """Start a draft with seeded random within-team pick orders.

    ``pick_order`` is "snake" (A,B,B,A,A,B,B,A,A,B) or "alternate" (A,B,A,B,...).
    """
    catalog_ids = list(catalog_ids)
    if len(catalog_ids) < 10:
        raise DataError(f"pool of {len(catalog_ids)} champions is too small for a draft")
    players = [h.player_id for t in TEAMS for h in rosters[t]]
    if len(players) != 10 or len(set(players)) != 10:
        raise DataError("rosters must contain 10 distinct players")
    for team in TEAMS:
        if len(rosters[team]) != 5 or any(not h.usable for h in rosters[team]):
            raise DataError(f"team {team} needs 5 usable player histories")
    if set(sides.values()) != {"Top", "Bottom"}:
        raise DataError("sides must assign Top and Bottom")

    rng = np.random.default_rng(seed)
    slot_orders = {team: [int(s) for s in rng.permutation(5)] for team in TEAMS}
    if pick_order == "snake":
        turn_teams = ["A", "B", "B", "A", "A", "B", "B", "A", "A", "B"]
    elif pick_order == "alternate":
        turn_teams = ["A", "B"] * 5
    else:
        raise DataError(f"unknown pick order {pick_order!r}")
    counters = {team: 0 for team in TEAMS}
    pick_sequence = []
    for team in turn_teams:
        pick_sequence.append((team, slot_orders[team][counters[team]]))
        counters[team] += 1

    return DraftState(
        phase="Ban",
        pool=frozenset(catalog_ids),
        bans={team: () for team in TEAMS},
        ban_sequence=("A", "B") * BANS_PER_TEAM,
        pick_sequence=tuple(pick_sequence),
        picks={team: {} for team in TEAMS},
        rosters={team: tuple(h.player_id for h in rosters[team]) for team in TEAMS},
        histories={h.player_id: h for t in TEAMS for h in rosters[t]},
        sides=dict(sides),
        turn_cursor=0,
        ban_cursor=0,
    )


def state_to_dict(state: DraftState) -> dict:
    """JSON-friendly snapshot; player histories are referenced by id only."""
    return {
        "phase": state.phase,
        "pool": sorted(state.pool),
        "bans": {t: list(state.bans[t]) for t in TEAMS},
        "ban_sequence": list(state.ban_sequence),
        "pick_sequence": [[t, s] for t, s in state.pick_sequence],
        "picks": {t: {str(s): c for s, c in state.picks[t].items()} for t in TEAMS},
        "rosters": {t: list(state.rosters[t]) for t in TEAMS},
        "sides": dict(state.sides),
        "turn_cursor": state.turn_cursor,
        "ban_cursor": state.ban_cursor,
    }


def state_from_dict(payload: dict, histories: dict[str, PlayerHistory]) -> DraftState:
    """Rebuild a state snapshot, resolving roster player ids against ``histories``."""
    for team in TEAMS:
        for player_id in payload["rosters"][team]:
            if player_id not in histories:
                raise DataError(f"no history for rostered player {player_id!r}")
    return DraftState(
        phase=payload["phase"],
        pool=frozenset(payload["pool"]),
        bans={t: tuple(payload["bans"][t]) for t in TEAMS},
        ban_sequence=tuple(payload["ban_sequence"]),
        pick_sequence=tuple((t, int(s)) for t, s in payload["pick_sequence"]),
        picks={t: {int(s): c for s, c in payload["picks"][t].items()} for t in TEAMS},
        rosters={t: tuple(payload["rosters"][t]) for t in TEAMS},
        histories={p: histories[p] for t in TEAMS for p in payload["rosters"][t]},
        sides=dict(payload["sides"]),
        turn_cursor=payload["turn_cursor"],
        ban_cursor=payload["ban_cursor"],
    )


def legal_actions(state: DraftState) -> set[Action]:
    if state.phase == "Ban":
        team = state.ban_sequence[state.ban_cursor]
        return {Action("ban", team=team, champion=c) for c in state.pool}
    if state.phase == "Pick":
        team, _ = state.acting_turn()
        return {Action("pick", team=team, champion=c) for c in state.pool}
    if state.phase == "Trade":
        actions = {
            Action("swap", team=team, slot_a=a, slot_b=b)
            for team in TEAMS
            for a, b in combinations(range(5), 2)
        }
        actions.add(Action("finalize"))
        return actions
    return set()


def apply_action(state: DraftState, action: Action) -> DraftState:
    """Apply a legal action; illegal actions raise and leave the state unchanged."""
    if action not in legal_actions(state):
        raise IllegalActionError(f"illegal action {action.to_dict()} in phase {state.phase}")
    if action.kind == "ban":
        bans = dict(state.bans)
        bans[action.team] = bans[action.team] + (action.champion,)
        cursor = state.ban_cursor + 1
        phase = "Pick" if cursor == len(state.ban_sequence) else "Ban"
        return replace(
            state, phase=phase, pool=state.pool - {action.champion}, bans=bans, ban_cursor=cursor
        )
    if action.kind == "pick":
        team, slot = state.acting_turn()
        picks = {t: dict(state.picks[t]) for t in TEAMS}
        picks[team][slot] = action.champion
        cursor = state.turn_cursor + 1
        phase = "Trade" if cursor == len(state.pick_sequence) else "Pick"
        return replace(
            state, phase=phase, pool=state.pool - {action.champion}, picks=picks, turn_cursor=cursor
        )
    if action.kind == "swap":
        picks = {t: dict(state.picks[t]) for t in TEAMS}
        team_picks = picks[action.team]
        team_picks[action.slot_a], team_picks[action.slot_b] = (
            team_picks[action.slot_b],
            team_picks[action.slot_a],
        )
        return replace(state, picks=picks)
    return replace(state, phase="Complete")


def replay(state: DraftState, actions) -> DraftState:
    """Re-apply a logged action sequence to an initial state."""
    for action in actions:
        state = apply_action(state, action)
    return state


def _nearest_available(space: SimilaritySpace, favorite: str, available) -> str:
    """Most similar available champion to the favorite; ties break lexicographically."""
    return min(available, key=lambda c: (space.dist[space.index(favorite), space.index(c)], c))


def _impute_team(
    state: DraftState, space: SimilaritySpace, team: str, forced: dict[int, str]
) -> list[str]:
    """Complete a team's picks greedily in slot order: each unfilled slot takes the
    player's most-picked champion if still available, else the nearest available one."""
    champs: dict[int, str] = dict(state.picks[team])
    champs.update(forced)
    taken = set(champs.values())
    available = [c for c in sorted(state.pool) if c not in taken]
    for slot in range(5):
        if slot in champs:
            continue
        favorite = most_picked(state.histories[state.rosters[team][slot]])
        choice = favorite if favorite in available else _nearest_available(space, favorite, available)
        champs[slot] = choice
        available.remove(choice)
    return [champs[s] for s in range(5)]


def recommend(
    state: DraftState, model: WinModel, space: SimilaritySpace, top_n: int = 5
) -> Recommendation:
    """Rank legal picks for the acting slot by projected full-team win probability."""
    team, slot = state.acting_turn()
    histories = [state.histories[p] for p in state.rosters[team]]
    acting_history = state.histories[state.rosters[team][slot]]
    favorite = most_picked(acting_history)
    side = state.sides[team]
    scored = []
    for champ in sorted(state.pool):
        champs = _impute_team(state, space, team, {slot: champ})
        vector = vector_from_team(space, champs, histories, side)
        win_p = predict(model, vector)
        prof = 1.0 - float(space.dist[space.index(favorite), space.index(champ)])
        scored.append(
            Candidate(
                champion_id=champ,
                win_probability=win_p,
                proficiency_component=prof,
                congruency_after=vector.congruency,
                diversity_after=vector.diversity,
                explanation=(
                    f"p(win)={win_p:.3f}, proficiency {prof:.3f}, "
                    f"covers {vector.congruency}/{space.clusters} clusters"
                ),
            )
        )
    scored.sort(key=lambda c: (-c.win_probability, -c.proficiency_component, c.champion_id))
    return Recommendation(candidates=tuple(scored[:top_n]))


def optimize_trades(
    state: DraftState, space: SimilaritySpace, team: str
) -> tuple[dict[int, str], float]:
    """Exact best reassignment of the team's five picks to its five players.

    Maximizes mean proficiency over all 120 permutations; ties prefer fewest
    swaps from the current assignment, then the lexicographically smallest
    champion tuple. Returns (slot -> champion, mean proficiency gain >= 0).
    """
    if state.phase != "Trade":
        raise IllegalActionError(f"trades only in Trade phase, not {state.phase}")
    if len(state.picks[team]) != 5:
        raise IllegalActionError(f"team {team} has {len(state.picks[team])} picks, needs 5")
    current = tuple(state.picks[team][s] for s in range(5))
    favorites = [most_picked(state.histories[p]) for p in state.rosters[team]]
    fav_idx = [space.index(f) for f in favorites]

    def total(assign) -> float:
        return sum(1.0 - float(space.dist[fav_idx[s], space.index(c)]) for s, c in enumerate(assign))

    current_total = total(current)
    best, best_key = current, None
    for perm in permutations(current):
        moved = sum(1 for a, b in zip(perm, current) if a != b)
        key = (-total(perm), moved, perm)
        if best_key is None or key < best_key:
            best_key, best = key, perm
    gain = (total(best) - current_total) / 5.0
    return {s: c for s, c in enumerate(best)}, gain

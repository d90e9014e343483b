from itertools import permutations

import numpy as np
import pytest

from conftest import make_history, space_from_coords
from draftlab.draft import (
    Action,
    DraftState,
    apply_action,
    legal_actions,
    new_draft,
    optimize_trades,
    recommend,
    replay,
    state_from_dict,
    state_to_dict,
)
from draftlab.errors import DataError, IllegalActionError
from draftlab.features import FEATURE_ORDER
from draftlab.winmodel import train


N_CHAMPS = 24
CHAMP_IDS = [f"c{i:03d}" for i in range(N_CHAMPS)]


def make_space(rng):
    labels = [(i % 5) + 1 for i in range(N_CHAMPS)]
    return space_from_coords(rng.normal(size=(N_CHAMPS, 8)), clusters=labels, ids=CHAMP_IDS)


def make_rosters(rng):
    rosters = {}
    for team in ("A", "B"):
        players = []
        for k in range(5):
            fav = CHAMP_IDS[int(rng.integers(N_CHAMPS))]
            other = CHAMP_IDS[int(rng.integers(N_CHAMPS))]
            picks = {fav: 8}
            picks[other] = picks.get(other, 0) + 3
            players.append(make_history(f"{team}{k}", picks))
        rosters[team] = players
    return rosters


def fresh_draft(rng, seed=0, pick_order="snake"):
    return new_draft(CHAMP_IDS, make_rosters(rng), {"A": "Top", "B": "Bottom"}, seed=seed, pick_order=pick_order)


def run_to_phase(state, rng, phase):
    """Advance with uniformly random legal actions until the target phase."""
    while state.phase != phase:
        actions = sorted(legal_actions(state) - {Action("finalize")}, key=lambda a: str(a.to_dict()))
        state = apply_action(state, actions[int(rng.integers(len(actions)))])
    return state


class TestNewDraft:
    def test_ban_order_alternates(self, rng):
        state = fresh_draft(rng)
        assert state.ban_sequence == ("A", "B", "A", "B", "A", "B")
        assert state.phase == "Ban"

    def test_snake_team_order(self, rng):
        state = fresh_draft(rng)
        assert [t for t, _ in state.pick_sequence] == ["A", "B", "B", "A", "A", "B", "B", "A", "A", "B"]

    def test_alternate_team_order(self, rng):
        state = fresh_draft(rng, pick_order="alternate")
        assert [t for t, _ in state.pick_sequence] == ["A", "B"] * 5

    def test_slot_order_is_seeded_permutation(self, rng):
        state = fresh_draft(rng, seed=42)
        for team in ("A", "B"):
            slots = [s for t, s in state.pick_sequence if t == team]
            assert sorted(slots) == [0, 1, 2, 3, 4]
        again = new_draft(
            CHAMP_IDS,
            {t: [state.histories[p] for p in state.rosters[t]] for t in ("A", "B")},
            state.sides,
            seed=42,
        )
        assert again.pick_sequence == state.pick_sequence
        other = new_draft(
            CHAMP_IDS,
            {t: [state.histories[p] for p in state.rosters[t]] for t in ("A", "B")},
            state.sides,
            seed=43,
        )
        assert other.pick_sequence != state.pick_sequence

    def test_validation(self, rng):
        rosters = make_rosters(rng)
        with pytest.raises(DataError):
            new_draft(CHAMP_IDS[:9], rosters, {"A": "Top", "B": "Bottom"})
        with pytest.raises(DataError):
            new_draft(CHAMP_IDS, rosters, {"A": "Top", "B": "Top"})
        short = {"A": rosters["A"][:4], "B": rosters["B"]}
        with pytest.raises(DataError):
            new_draft(CHAMP_IDS, short, {"A": "Top", "B": "Bottom"})


class TestPhases:
    def test_full_happy_path(self, rng):
        state = fresh_draft(rng)
        for i in range(6):
            team = state.ban_sequence[i]
            champ = sorted(state.pool)[0]
            state = apply_action(state, Action("ban", team=team, champion=champ))
        assert state.phase == "Pick"
        assert all(len(state.bans[t]) == 3 for t in ("A", "B"))
        for _ in range(10):
            team, _ = state.acting_turn()
            champ = sorted(state.pool)[0]
            state = apply_action(state, Action("pick", team=team, champion=champ))
        assert state.phase == "Trade"
        assert all(len(state.picks[t]) == 5 for t in ("A", "B"))
        state = apply_action(state, Action("swap", team="A", slot_a=0, slot_b=3))
        state = apply_action(state, Action("finalize"))
        assert state.phase == "Complete"
        assert legal_actions(state) == set()

    def test_banned_champion_not_pickable(self, rng):
        state = fresh_draft(rng)
        banned = sorted(state.pool)[5]
        state = apply_action(state, Action("ban", team="A", champion=banned))
        state = run_to_phase(state, rng, "Pick")
        assert banned not in state.pool
        team, _ = state.acting_turn()
        with pytest.raises(IllegalActionError):
            apply_action(state, Action("pick", team=team, champion=banned))

    def test_out_of_turn_ban_rejected(self, rng):
        state = fresh_draft(rng)
        with pytest.raises(IllegalActionError):
            apply_action(state, Action("ban", team="B", champion=sorted(state.pool)[0]))

    def test_swap_exchanges_champions(self, rng):
        state = run_to_phase(fresh_draft(rng), rng, "Trade")
        before = dict(state.picks["B"])
        after = apply_action(state, Action("swap", team="B", slot_a=1, slot_b=4)).picks["B"]
        assert after[1] == before[4] and after[4] == before[1]
        assert all(after[s] == before[s] for s in (0, 2, 3))

    def test_pick_before_bans_done_rejected(self, rng):
        state = fresh_draft(rng)
        with pytest.raises(IllegalActionError):
            apply_action(state, Action("pick", team="A", champion=sorted(state.pool)[0]))


class TestFuzz:
    def test_random_walks_hold_invariants(self, rng):
        for trial in range(50):
            state = fresh_draft(rng, seed=trial)
            steps = 0
            while state.phase != "Complete" and steps < 40:
                actions = sorted(legal_actions(state), key=lambda a: str(a.to_dict()))
                state = apply_action(state, actions[int(rng.integers(len(actions)))])
                state.check_invariants()
                steps += 1

    def test_illegal_action_leaves_state_unchanged(self, rng):
        state = run_to_phase(fresh_draft(rng), rng, "Pick")
        snapshot = state_to_dict(state)
        with pytest.raises(IllegalActionError):
            apply_action(state, Action("ban", team="A", champion=sorted(state.pool)[0]))
        assert state_to_dict(state) == snapshot

    def test_replay_reproduces_state(self, rng):
        for trial in range(10):
            initial = fresh_draft(rng, seed=100 + trial)
            log, state = [], initial
            while state.phase != "Complete":
                actions = sorted(legal_actions(state), key=lambda a: str(a.to_dict()))
                action = actions[int(rng.integers(len(actions)))]
                log.append(action)
                state = apply_action(state, action)
            replayed = replay(initial, [Action.from_dict(a.to_dict()) for a in log])
            assert state_to_dict(replayed) == state_to_dict(state)


class TestSnapshot:
    def test_roundtrip(self, rng):
        state = run_to_phase(fresh_draft(rng), rng, "Trade")
        restored = state_from_dict(state_to_dict(state), state.histories)
        assert restored == state

    def test_missing_history(self, rng):
        state = fresh_draft(rng)
        histories = dict(state.histories)
        del histories["A0"]
        with pytest.raises(DataError):
            state_from_dict(state_to_dict(state), histories)


def trained_model(rng):
    """Tiny model favouring proficiency so recommendations are discriminative."""
    from draftlab.features import TeamFeatureVector

    def vec(values):
        return TeamFeatureVector(**dict(zip(FEATURE_ORDER, values)))

    x = rng.normal(size=(400, len(FEATURE_ORDER)))
    y = rng.random(400) < 1.0 / (1.0 + np.exp(-3.0 * x[:, 0]))
    rows = [(vec(x[i]), "Win" if y[i] else "Loss") for i in range(400)]
    return train(rows, folds=5, seed=0)


class TestRecommend:
    def test_candidates_sorted_and_legal(self, rng):
        space = make_space(rng)
        model = trained_model(rng)
        state = run_to_phase(fresh_draft(rng), rng, "Pick")
        rec = recommend(state, model, space, top_n=5)
        assert len(rec.candidates) == 5
        probs = [c.win_probability for c in rec.candidates]
        assert probs == sorted(probs, reverse=True)
        for cand in rec.candidates:
            assert cand.champion_id in state.pool
            assert 0.0 < cand.win_probability < 1.0
            assert cand.explanation

    def test_scores_match_direct_projection(self, rng):
        from draftlab.draft import _impute_team
        from draftlab.features import vector_from_team
        from draftlab.winmodel import predict

        space = make_space(rng)
        model = trained_model(rng)
        state = run_to_phase(fresh_draft(rng), rng, "Pick")
        team, slot = state.acting_turn()
        histories = [state.histories[p] for p in state.rosters[team]]
        rec = recommend(state, model, space, top_n=3)
        for cand in rec.candidates:
            champs = _impute_team(state, space, team, {slot: cand.champion_id})
            vector = vector_from_team(space, champs, histories, state.sides[team])
            assert cand.win_probability == pytest.approx(predict(model, vector), abs=1e-12)

    def test_requires_pick_phase(self, rng):
        space = make_space(rng)
        model = trained_model(rng)
        state = fresh_draft(rng)
        with pytest.raises(IllegalActionError):
            recommend(state, model, space)

    def test_deterministic(self, rng):
        space = make_space(rng)
        model = trained_model(rng)
        state = run_to_phase(fresh_draft(rng), rng, "Pick")
        a = recommend(state, model, space, top_n=5)
        b = recommend(state, model, space, top_n=5)
        assert a == b


class TestOptimizeTrades:
    def _trade_state(self, rng, seed=0):
        state = fresh_draft(rng, seed=seed)
        return run_to_phase(state, rng, "Trade")

    def test_matches_brute_force(self, rng):
        space = make_space(rng)
        from draftlab.roster import most_picked

        for trial in range(20):
            state = self._trade_state(rng, seed=trial)
            for team in ("A", "B"):
                assignment, gain = optimize_trades(state, space, team)
                current = tuple(state.picks[team][s] for s in range(5))
                favs = [space.index(most_picked(state.histories[p])) for p in state.rosters[team]]

                def total(perm):
                    return sum(1.0 - float(space.dist[favs[s], space.index(c)]) for s, c in enumerate(perm))

                best = max(total(p) for p in permutations(current))
                chosen = tuple(assignment[s] for s in range(5))
                assert total(chosen) == pytest.approx(best, abs=1e-12)
                assert gain == pytest.approx((best - total(current)) / 5.0, abs=1e-12)
                assert gain >= -1e-12

    def test_tie_prefers_fewest_swaps(self):
        # Orthogonal coords: every non-favorite champion is equidistant from every
        # favorite, so all permutations tie and the optimizer must keep the
        # current assignment (zero swaps).
        coords = np.eye(20)
        ids = [f"c{i:03d}" for i in range(20)]
        space = space_from_coords(coords, ids=ids)
        rosters = {
            "A": [make_history(f"A{k}", {ids[10 + k]: 3}) for k in range(5)],
            "B": [make_history(f"B{k}", {ids[15 + k]: 3}) for k in range(5)],
        }
        state = new_draft(ids, rosters, {"A": "Top", "B": "Bottom"}, seed=1)
        for i in range(6):  # ban the favorites so no picked champion matches one
            team = state.ban_sequence[i]
            state = apply_action(state, Action("ban", team=team, champion=ids[10 + i]))
        for _ in range(10):  # picks land on ids 0..9, all orthogonal to favorites
            team, _ = state.acting_turn()
            state = apply_action(state, Action("pick", team=team, champion=sorted(state.pool)[0]))
        assignment, gain = optimize_trades(state, space, "A")
        assert assignment == {s: state.picks["A"][s] for s in range(5)}
        assert gain == pytest.approx(0.0, abs=1e-12)

    def test_requires_trade_phase(self, rng):
        space = make_space(rng)
        state = fresh_draft(rng)
        with pytest.raises(IllegalActionError):
            optimize_trades(state, space, "A")

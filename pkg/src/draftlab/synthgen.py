"""Seeded synthetic catalogs, player populations, and match corpora with planted effects.

All randomness flows through counter-based Philox streams keyed by (seed, stream id),
so corpora are bit-reproducible across platforms and match order.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError
from .features import FEATURE_ORDER, MatchRecord, Slot, TeamRecord, vector_from_team
from .roster import SINGLE_DIVISION_TIERS, TIERS, PlayerHistory, most_picked
from .space import ChampionCatalog, SimilaritySpace, build_space

TRUTH_FORMAT_VERSION = 1

# Diff-model features: everything except the side indicator, whose effect is
# carried by the calibrated intercept derived from bottom_side_rate.
DIFF_FEATURES = tuple(f for f in FEATURE_ORDER if f != "starting_bottom")

_STREAM_CATALOG = 1
_STREAM_PLAYERS = 2
_STREAM_MATCH = 3
_STREAM_OUTCOME = 4

_DEFAULT_TIER_MIX = {"Bronze": 0.25, "Silver": 0.25, "Gold": 0.25, "Platinum": 0.25}
_DEFAULT_CONCENTRATION = {
    "Bronze": 1.0, "Silver": 0.7, "Gold": 0.5, "Platinum": 0.35,
    "Diamond": 0.25, "Master": 0.4, "Challenger": 0.5,
}


def _stream(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), ((stream << 32) | index) & (2**64 - 1)]))


@dataclass
class GeneratorConfig:
    n_champions: int = 126
    feature_dim: int = 30
    n_clusters: int = 5
    cluster_separation: float = 6.0
    n_players: int = 400
    tier_mix: dict = field(default_factory=lambda: dict(_DEFAULT_TIER_MIX))
    preference_concentration: dict = field(default_factory=lambda: dict(_DEFAULT_CONCENTRATION))
    n_matches: int = 1000
    planted_beta: dict = field(default_factory=dict)
    bottom_side_rate: float = 0.5
    seed: int = 0
    picks_per_player: int = 60

    def __post_init__(self):
        if self.n_champions < self.n_clusters:
            raise DataError("n_champions must be >= n_clusters")
        if self.cluster_separation < 0:
            raise DataError("cluster_separation must be >= 0")
        if not math.isclose(sum(self.tier_mix.values()), 1.0, abs_tol=1e-9):
            raise DataError("tier_mix probabilities must sum to 1")
        for tier in self.tier_mix:
            if tier not in TIERS:
                raise DataError(f"unknown tier {tier!r} in tier_mix")
        for tier, conc in self.preference_concentration.items():
            if conc <= 0:
                raise DataError(f"preference_concentration[{tier}] must be > 0")
        if not (0.0 < self.bottom_side_rate < 1.0):
            raise DataError("bottom_side_rate must be in (0, 1)")
        unknown = set(self.planted_beta) - set(FEATURE_ORDER)
        if unknown:
            raise DataError(f"planted_beta has unknown features: {sorted(unknown)}")
        if self.planted_beta.get("starting_bottom"):
            warnings.warn("planted_beta['starting_bottom'] is ignored; use bottom_side_rate")

    def to_dict(self) -> dict:
        return {
            "n_champions": self.n_champions, "feature_dim": self.feature_dim,
            "n_clusters": self.n_clusters, "cluster_separation": self.cluster_separation,
            "n_players": self.n_players, "tier_mix": self.tier_mix,
            "preference_concentration": self.preference_concentration,
            "n_matches": self.n_matches, "planted_beta": self.planted_beta,
            "bottom_side_rate": self.bottom_side_rate, "seed": self.seed,
            "picks_per_player": self.picks_per_player,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "GeneratorConfig":
        return cls(**payload)


def gen_catalog(config: GeneratorConfig) -> tuple[ChampionCatalog, np.ndarray]:
    """Gaussian blob catalog; returns (catalog, planted 1-based cluster labels)."""
    rng = _stream(config.seed, _STREAM_CATALOG)
    k, d, n = config.n_clusters, config.feature_dim, config.n_champions
    raw = rng.normal(size=(k, d))
    if config.cluster_separation > 0 and k > 1:
        min_dist = min(
            np.linalg.norm(raw[i] - raw[j]) for i in range(k) for j in range(i + 1, k)
        )
        centers = raw * (config.cluster_separation / min_dist)
    else:
        centers = np.zeros((k, d))
    labels = np.arange(n) % k
    points = centers[labels] + rng.normal(size=(n, d))
    ids = [f"c{i:03d}" for i in range(n)]
    names = [f"f{j:03d}" for j in range(d)]
    return ChampionCatalog(ids, points, names), labels + 1


def gen_players(config: GeneratorConfig) -> list[PlayerHistory]:
    """Players with tier-specific preference concentration over champions.

    Low concentration yields specialists (low generality); high concentration
    yields generalists approaching uniform-entropy pick distributions.
    """
    rng = _stream(config.seed, _STREAM_PLAYERS)
    champ_ids = [f"c{i:03d}" for i in range(config.n_champions)]
    tiers = sorted(config.tier_mix)
    probs = np.array([config.tier_mix[t] for t in tiers])
    players = []
    for i in range(config.n_players):
        tier = tiers[rng.choice(len(tiers), p=probs)]
        division = 1 if tier in SINGLE_DIVISION_TIERS else int(rng.integers(1, 6))
        alpha = config.preference_concentration.get(tier, 1.0)
        gamma = rng.gamma(alpha, size=config.n_champions)
        if gamma.sum() <= 0.0:  # underflow at tiny alpha: degenerate specialist
            pref = np.zeros(config.n_champions)
            pref[rng.integers(config.n_champions)] = 1.0
        else:
            pref = gamma / gamma.sum()
        counts = rng.multinomial(config.picks_per_player, pref)
        picks = {champ_ids[j]: int(c) for j, c in enumerate(counts) if c > 0}
        players.append(PlayerHistory(f"p{i:04d}", "SYN", tier, division, picks))
    return players


@dataclass
class GroundTruth:
    """Sidecar oracle data recorded by gen_matches."""

    config: GeneratorConfig
    match_ids: list[str]
    true_p_bottom: np.ndarray  # per-match P(bottom team wins) given both teams
    team_scores: np.ndarray  # (n_matches, 2): planted linear score of (bottom, top) teams
    const_term: float  # side intercept minus the standardization offset
    diff_means: np.ndarray
    diff_stds: np.ndarray
    beta: np.ndarray  # aligned to DIFF_FEATURES
    planted_labels: np.ndarray | None = None

    def bayes_match_accuracy(self) -> float:
        """Accuracy of the optimal predictor that sees both teams' features."""
        return float(np.mean(np.maximum(self.true_p_bottom, 1.0 - self.true_p_bottom)))

    def bayes_row_accuracy(self, n_opponents: int = 4096, seed: int = 0) -> float:
        """Best achievable per-team-row accuracy for a classifier seeing only
        that team's features and side, estimated by Monte Carlo over the
        empirical opponent pool. Upper-bounds any per-team classifier's CV accuracy."""
        scores = self.team_scores
        pool = scores.reshape(-1)
        rng = np.random.default_rng(seed)
        if len(pool) > n_opponents:
            pool = rng.choice(pool, size=n_opponents, replace=False)
        acc = 0.0
        for side_col, sign in ((0, 1.0), (1, -1.0)):
            # sign flips the side intercept: bottom rows get +const, top rows -const.
            s = scores[:, side_col]
            p_row = _sigmoid((s[:, None] - pool[None, :]) + sign * self.const_term).mean(axis=1)
            acc += float(np.maximum(p_row, 1.0 - p_row).sum())
        return acc / (2 * len(scores))

    def save(self, path) -> None:
        payload = {
            "format_version": TRUTH_FORMAT_VERSION,
            "config": self.config.to_dict(),
            "match_ids": self.match_ids,
            "true_p_bottom": self.true_p_bottom.tolist(),
            "team_scores": self.team_scores.tolist(),
            "const_term": self.const_term,
            "diff_means": self.diff_means.tolist(),
            "diff_stds": self.diff_stds.tolist(),
            "beta": self.beta.tolist(),
            "planted_labels": None if self.planted_labels is None else self.planted_labels.tolist(),
        }
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load(cls, path) -> "GroundTruth":
        payload = json.loads(Path(path).read_text())
        if payload.get("format_version") != TRUTH_FORMAT_VERSION:
            raise DataError(f"{path}: unsupported ground-truth format version")
        labels = payload["planted_labels"]
        return cls(
            config=GeneratorConfig.from_dict(payload["config"]),
            match_ids=payload["match_ids"],
            true_p_bottom=np.array(payload["true_p_bottom"]),
            team_scores=np.array(payload["team_scores"]),
            const_term=payload["const_term"],
            diff_means=np.array(payload["diff_means"]),
            diff_stds=np.array(payload["diff_stds"]),
            beta=np.array(payload["beta"]),
            planted_labels=None if labels is None else np.array(labels),
        )


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _sample_pick(rng, history: PlayerHistory, taken: set, space: SimilaritySpace, all_ids: list[str]) -> str:
    candidates = [(c, n) for c, n in sorted(history.picks.items()) if c not in taken]
    if candidates:
        counts = np.array([n for _, n in candidates], dtype=float)
        j = rng.choice(len(candidates), p=counts / counts.sum())
        return candidates[j][0]
    # Every champion the player has history with is taken: fall back to the
    # nearest still-available champion to their most-picked one.
    favorite = most_picked(history)
    available = [c for c in all_ids if c not in taken]
    fav = space.index(favorite)
    return min(available, key=lambda c: (space.dist[fav, space.index(c)], c))


def gen_matches(
    config: GeneratorConfig,
    catalog: ChampionCatalog,
    players: list[PlayerHistory],
    space: SimilaritySpace | None = None,
) -> tuple[list[MatchRecord], GroundTruth]:
    """Assemble within-tier random teams, simulate champion selection, and draw
    outcomes from the planted logistic model over standardized feature differences."""
    if space is None:
        components = min(10, catalog.dim, catalog.n_champions - 1)
        space = build_space(catalog, components=components, clusters=config.n_clusters, seed=config.seed)

    by_tier: dict[str, list[PlayerHistory]] = {}
    for p in players:
        if p.usable:
            by_tier.setdefault(p.tier, []).append(p)
    tiers = [t for t in sorted(config.tier_mix) if config.tier_mix[t] > 0]
    usable_tiers = [t for t in tiers if len(by_tier.get(t, [])) >= 10]
    if not usable_tiers:
        raise DataError("no tier has at least 10 usable players")
    probs = np.array([config.tier_mix[t] for t in usable_tiers])
    probs = probs / probs.sum()

    snake = ["A", "B", "B", "A", "A", "B", "B", "A", "A", "B"]
    drafts = []  # (tier, division, bottom_team, per-team slots)
    for i in range(config.n_matches):
        rng = _stream(config.seed, _STREAM_MATCH, i)
        tier = usable_tiers[rng.choice(len(usable_tiers), p=probs)]
        pool = by_tier[tier]
        chosen = [pool[j] for j in rng.choice(len(pool), size=10, replace=False)]
        teams = {"A": chosen[:5], "B": chosen[5:]}
        bottom = "A" if rng.random() < 0.5 else "B"
        slot_orders = {t: [int(s) for s in rng.permutation(5)] for t in ("A", "B")}
        taken: set = set()
        counters = {"A": 0, "B": 0}
        picks = {"A": {}, "B": {}}
        pick_pos = {"A": {}, "B": {}}
        for t in snake:
            slot = slot_orders[t][counters[t]]
            counters[t] += 1
            champ = _sample_pick(rng, teams[t][slot], taken, space, catalog.champion_ids)
            taken.add(champ)
            picks[t][slot] = champ
            pick_pos[t][slot] = counters[t]
        division = 1 if tier in SINGLE_DIVISION_TIERS else int(rng.integers(1, 6))
        drafts.append((tier, division, bottom, teams, picks, pick_pos))

    # Planted outcome model over standardized bottom-minus-top feature diffs.
    feats = np.empty((config.n_matches, 2, len(DIFF_FEATURES)))
    for i, (tier, division, bottom, teams, picks, _) in enumerate(drafts):
        top = "A" if bottom == "B" else "B"
        for col, team in enumerate((bottom, top)):
            champs = [picks[team][s] for s in range(5)]
            vec = vector_from_team(space, champs, teams[team], "Bottom" if col == 0 else "Top")
            feats[i, col] = [float(getattr(vec, f)) for f in DIFF_FEATURES]

    diffs = feats[:, 0, :] - feats[:, 1, :]
    diff_means = diffs.mean(axis=0)
    diff_stds = diffs.std(axis=0, ddof=0)
    diff_stds = np.where(diff_stds == 0.0, 1.0, diff_stds)
    beta = np.array([config.planted_beta.get(f, 0.0) for f in DIFF_FEATURES])
    b_side = math.log(config.bottom_side_rate / (1.0 - config.bottom_side_rate))
    const_term = b_side - float(beta @ (diff_means / diff_stds))
    team_scores = feats @ (beta / diff_stds)
    true_p = _sigmoid(team_scores[:, 0] - team_scores[:, 1] + const_term)

    matches = []
    for i, (tier, division, bottom, teams, picks, pick_pos) in enumerate(drafts):
        rng = _stream(config.seed, _STREAM_OUTCOME, i)
        bottom_wins = rng.random() < true_p[i]
        records = []
        for t in ("A", "B"):
            side = "Bottom" if t == bottom else "Top"
            win = bottom_wins == (t == bottom)
            slots = tuple(
                Slot(teams[t][s].player_id, picks[t][s], pick_pos[t][s]) for s in range(5)
            )
            records.append(TeamRecord(side=side, slots=slots, outcome="Win" if win else "Loss"))
        matches.append(MatchRecord(f"m{i:06d}", "SYN", tier, division, tuple(records)))

    truth = GroundTruth(
        config=config,
        match_ids=[m.match_id for m in matches],
        true_p_bottom=true_p,
        team_scores=team_scores,
        const_term=const_term,
        diff_means=diff_means,
        diff_stds=diff_stds,
        beta=beta,
    )
    return matches, truth

"""Aggregate corpus analyses: tier profiles, relative win-rate curves, pick-order
proficiency, and per-tier regression coefficients. All outputs are plot-ready tables."""

from __future__ import annotations

import numpy as np
import pandas as pd

from .errors import DataError
from .features import FEATURE_ORDER, background_diversity, proficiency, team_features
from .roster import TIERS
from .space import SimilaritySpace

_Z95 = 1.959963984540054


def build_team_table(matches, histories, space: SimilaritySpace) -> pd.DataFrame:
    """One row per team per match: identifiers, outcome, and all model features."""
    rows = []
    for match in matches:
        for team in match.teams:
            vec = team_features(space, match, team.side, histories)
            row = {
                "match_id": match.match_id,
                "region": match.region,
                "tier": match.tier,
                "division": match.division,
                "side": team.side,
                "win": 1 if team.outcome == "Win" else 0,
            }
            row.update({name: value for name, value in zip(FEATURE_ORDER, vec.as_tuple())})
            rows.append(row)
    if not rows:
        raise DataError("empty corpus")
    return pd.DataFrame(rows)


def build_slot_table(matches, histories, space: SimilaritySpace) -> pd.DataFrame:
    """One row per player slot: pick order, proficiency, and team background diversity."""
    rows = []
    for match in matches:
        for team in match.teams:
            slot_histories = [histories[s.player_id] for s in team.slots]
            bd_mean, _, _ = background_diversity(space, slot_histories)
            for slot, history in zip(team.slots, slot_histories):
                rows.append(
                    {
                        "match_id": match.match_id,
                        "tier": match.tier,
                        "division": match.division,
                        "side": team.side,
                        "win": 1 if team.outcome == "Win" else 0,
                        "player_id": slot.player_id,
                        "pick_index": slot.pick_index,
                        "proficiency": proficiency(space, history, slot.champion_id),
                        "background_diversity": bd_mean,
                    }
                )
    if not rows:
        raise DataError("empty corpus")
    return pd.DataFrame(rows)


def tier_profile(team_df: pd.DataFrame, confidence: float = 0.95) -> pd.DataFrame:
    """Per (tier, division, outcome) feature means with normal-approximation intervals."""
    if confidence != 0.95:
        raise DataError("only the 95% confidence level is supported")
    records = []
    for (tier, division, win), group in team_df.groupby(["tier", "division", "win"]):
        n = len(group)
        for feature in FEATURE_ORDER:
            values = group[feature].to_numpy(dtype=float)
            half = _Z95 * values.std(ddof=0) / np.sqrt(n) if n > 0 else np.nan
            records.append(
                {
                    "tier": tier,
                    "division": division,
                    "outcome": "Win" if win else "Loss",
                    "feature": feature,
                    "mean": values.mean(),
                    "ci95_halfwidth": half,
                    "n": n,
                    "confidence": confidence,
                }
            )
    return pd.DataFrame(records)


def _paired(team_df: pd.DataFrame, feature: str) -> pd.DataFrame:
    if feature not in team_df.columns:
        raise DataError(f"unknown feature {feature!r}")
    merged = team_df.merge(team_df, on="match_id", suffixes=("", "_opp"))
    merged = merged[merged["side"] != merged["side_opp"]]
    merged = merged.assign(rel=merged[feature] - merged[f"{feature}_opp"])
    return merged[["match_id", "rel", "win"]]


def relative_winrate_curve(team_df: pd.DataFrame, feature: str, bins: int = 20) -> pd.DataFrame:
    """Win rate binned by (team feature minus opponent feature).

    Each match contributes both teams, so the curve is exactly antisymmetric:
    win_rate(bin) + win_rate(mirror bin) = 1, and the zero bin (exact ties)
    sits at 0.5. Nonzero values fall into ``bins`` equal-count bins whose
    edges are mirrored about 0 (bins must be even).
    """
    if bins < 2 or bins % 2 != 0:
        raise DataError("bins must be an even number >= 2")
    pairs = _paired(team_df, feature)
    rel = pairs["rel"].to_numpy(dtype=float)
    win = pairs["win"].to_numpy(dtype=float)

    half = bins // 2
    nonzero = rel != 0.0
    magnitudes = np.abs(rel[nonzero])
    records = []
    if nonzero.any():
        inner = np.quantile(magnitudes, np.arange(1, half) / half) if half > 1 else np.array([])
        # bin index: 1..half on magnitude, signed by the side of zero
        mag_bin = np.searchsorted(inner, magnitudes, side="right") + 1
        signed = np.where(rel[nonzero] > 0, mag_bin, -mag_bin)
        for b in range(-half, half + 1):
            if b == 0:
                continue
            mask = signed == b
            if not mask.any():
                continue
            records.append(
                {
                    "bin": b,
                    "rel_mean": float(rel[nonzero][mask].mean()),
                    "win_rate": float(win[nonzero][mask].mean()),
                    "count": int(mask.sum()),
                }
            )
    if (~nonzero).any():
        records.append(
            {
                "bin": 0,
                "rel_mean": 0.0,
                "win_rate": float(win[~nonzero].mean()),
                "count": int((~nonzero).sum()),
            }
        )
    return pd.DataFrame(records).sort_values("bin").reset_index(drop=True)


def pick_order_proficiency(
    slot_df: pd.DataFrame, bottom_bd_decile: bool = False
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Mean proficiency per (tier, pick order position) and the first/fifth-pick ratio per tier.

    With ``bottom_bd_decile`` only teams in each tier's bottom decile of
    background diversity are kept (the hardest-dilemma teams).
    """
    if "pick_index" not in slot_df.columns:
        raise DataError("slot table lacks pick_index")
    df = slot_df
    if bottom_bd_decile:
        cutoffs = df.groupby("tier")["background_diversity"].quantile(0.1)
        df = df[df["background_diversity"] <= df["tier"].map(cutoffs)]
    means = (
        df.groupby(["tier", "pick_index"])["proficiency"]
        .agg(["mean", "count"])
        .reset_index()
        .rename(columns={"mean": "mean_proficiency", "count": "n"})
    )
    ratios = []
    for tier, group in means.groupby("tier"):
        first = group.loc[group["pick_index"] == 1, "mean_proficiency"]
        fifth = group.loc[group["pick_index"] == 5, "mean_proficiency"]
        if len(first) and len(fifth) and float(fifth.iloc[0]) != 0.0:
            ratios.append({"tier": tier, "first_fifth_ratio": float(first.iloc[0]) / float(fifth.iloc[0])})
    order = {t: i for i, t in enumerate(TIERS)}
    ratios_df = pd.DataFrame(ratios)
    if len(ratios_df):
        ratios_df = ratios_df.sort_values(by="tier", key=lambda s: s.map(order)).reset_index(drop=True)
    return means, ratios_df


def correlation_by_tier(
    team_df: pd.DataFrame, x_feature: str, y_feature: str, controls: tuple = ()
) -> pd.DataFrame:
    """Per-tier OLS coefficient of y on x with optional controls, with 95% intervals."""
    for col in (x_feature, y_feature, *controls):
        if col not in team_df.columns:
            raise DataError(f"unknown feature {col!r}")
    records = []
    for tier, group in team_df.groupby("tier"):
        y = group[y_feature].to_numpy(dtype=float)
        cols = [np.ones(len(group)), group[x_feature].to_numpy(dtype=float)]
        cols += [group[c].to_numpy(dtype=float) for c in controls]
        x = np.column_stack(cols)
        if np.linalg.matrix_rank(x) < x.shape[1]:
            raise DataError(f"collinear design for tier {tier}: {x_feature} with controls {controls}")
        coef, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ coef
        dof = max(len(y) - x.shape[1], 1)
        sigma2 = float(resid @ resid) / dof
        cov = sigma2 * np.linalg.inv(x.T @ x)
        se = float(np.sqrt(cov[1, 1]))
        records.append(
            {
                "tier": tier,
                "coefficient": float(coef[1]),
                "ci95_low": float(coef[1]) - _Z95 * se,
                "ci95_high": float(coef[1]) + _Z95 * se,
                "n": len(y),
            }
        )
    order = {t: i for i, t in enumerate(TIERS)}
    return (
        pd.DataFrame(records)
        .sort_values(by="tier", key=lambda s: s.map(order))
        .reset_index(drop=True)
    )

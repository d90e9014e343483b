/** Pure view-model helpers: turn payloads into render-ready structures.
 *
 * Nothing here re-derives engine rules; these functions only reshape and
 * scale values the service already computed.
 */

import type { Candidate, Projection, SessionState, Team } from "./api.js";

export const CLUSTER_COLORS = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
] as const;

export function clusterColor(cluster: number): string {
  return CLUSTER_COLORS[(cluster - 1) % CLUSTER_COLORS.length] ?? CLUSTER_COLORS[0];
}

export interface ScatterPoint {
  championId: string;
  px: number; // pixel coordinates within the viewport
  py: number;
  cluster: number;
  color: string;
}

/** Scale MDS coordinates into a width x height viewport with padding. */
export function scatterLayout(
  projection: Projection,
  width: number,
  height: number,
  padding = 16,
): ScatterPoint[] {
  const champs = projection.champions;
  if (champs.length === 0) return [];
  const xs = champs.map((c) => c.x);
  const ys = champs.map((c) => c.y);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const innerW = width - 2 * padding;
  const innerH = height - 2 * padding;
  return champs.map((c) => ({
    championId: c.champion_id,
    px: padding + ((c.x - minX) / spanX) * innerW,
    py: padding + ((c.y - minY) / spanY) * innerH,
    cluster: c.cluster,
    color: clusterColor(c.cluster),
  }));
}

/** Distinct cluster labels (from the projection payload) among a team's picks. */
export function coveredClusters(
  state: SessionState,
  team: Team,
  projection: Projection,
): Set<number> {
  const byId = new Map(projection.champions.map((c) => [c.champion_id, c.cluster]));
  const covered = new Set<number>();
  for (const champion of Object.values(state.picks[team])) {
    const cluster = byId.get(champion);
    if (cluster !== undefined) covered.add(cluster);
  }
  return covered;
}

export function coverageLabel(covered: Set<number>, totalClusters: number): string {
  return `${covered.size} of ${totalClusters} clusters covered`;
}

export interface TurnSlot {
  team: Team;
  slot: number;
  playerId: string;
  champion: string | null;
  isActing: boolean;
}

/** The full pick order, annotated with what has already been picked. */
export function turnOrder(state: SessionState): TurnSlot[] {
  return state.pick_sequence.map(([team, slot]) => ({
    team,
    slot,
    playerId: state.rosters[team][slot] ?? "?",
    champion: state.picks[team][String(slot)] ?? null,
    isActing:
      state.phase === "Pick" &&
      state.acting !== null &&
      state.acting.team === team &&
      state.acting.slot === slot,
  }));
}

export function phaseLabel(state: SessionState): string {
  switch (state.phase) {
    case "Ban":
      return "Ban phase";
    case "Pick":
      return state.acting
        ? `Pick phase — ${state.acting.player_id} (team ${state.acting.team}) to pick`
        : "Pick phase";
    case "Trade":
      return "Trade phase — swap slots or finalize";
    case "Complete":
      return "Draft complete";
  }
}

export interface RecommendationRow {
  championId: string;
  winPct: string; // formatted percentage, straight from win_probability
  proficiency: string;
  congruency: number;
  diversity: string;
  explanation: string;
}

/** Format candidates for display, preserving the service's order exactly. */
export function recommendationRows(candidates: Candidate[]): RecommendationRow[] {
  return candidates.map((c) => ({
    championId: c.champion_id,
    winPct: `${(c.win_probability * 100).toFixed(1)}%`,
    proficiency: c.proficiency_component.toFixed(3),
    congruency: c.congruency_after,
    diversity: c.diversity_after.toFixed(3),
    explanation: c.explanation,
  }));
}

/** Slot swaps needed to go from the current picks to a proposed assignment. */
export function assignmentChanges(
  current: Record<string, string>,
  proposed: Record<string, string>,
): { slot: number; from: string; to: string }[] {
  const changes: { slot: number; from: string; to: string }[] = [];
  for (const [slot, to] of Object.entries(proposed)) {
    const from = current[slot];
    if (from !== undefined && from !== to) {
      changes.push({ slot: Number(slot), from, to });
    }
  }
  return changes.sort((a, b) => a.slot - b.slot);
}

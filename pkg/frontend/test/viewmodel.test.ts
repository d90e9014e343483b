import { describe, expect, it } from "vitest";

import type { Candidate, Projection, SessionState } from "../src/api.js";
import {
  assignmentChanges,
  clusterColor,
  coverageLabel,
  coveredClusters,
  phaseLabel,
  recommendationRows,
  scatterLayout,
  turnOrder,
} from "../src/viewmodel.js";

const PROJECTION: Projection = {
  clusters: 3,
  champions: [
    { champion_id: "c000", x: -2, y: 0, cluster: 1 },
    { champion_id: "c001", x: 2, y: 0, cluster: 1 },
    { champion_id: "c002", x: 0, y: -1, cluster: 2 },
    { champion_id: "c003", x: 0, y: 1, cluster: 3 },
  ],
};

function state(overrides: Partial<SessionState> = {}): SessionState {
  return {
    session_id: "s",
    seq: 0,
    phase: "Pick",
    pool: ["c000"],
    bans: { A: [], B: [] },
    picks: { A: {}, B: {} },
    pick_sequence: [
      ["A", 2],
      ["B", 0],
      ["B", 1],
      ["A", 0],
    ],
    rosters: { A: ["A0", "A1", "A2", "A3", "A4"], B: ["B0", "B1", "B2", "B3", "B4"] },
    sides: { A: "Top", B: "Bottom" },
    acting: { team: "A", slot: 2, player_id: "A2" },
    ...overrides,
  };
}

describe("scatterLayout", () => {
  it("maps data extremes to the padded viewport corners", () => {
    const points = scatterLayout(PROJECTION, 100, 100, 10);
    const byId = new Map(points.map((p) => [p.championId, p]));
    expect(byId.get("c000")!.px).toBeCloseTo(10, 10); // min x -> left edge
    expect(byId.get("c001")!.px).toBeCloseTo(90, 10); // max x -> right edge
    expect(byId.get("c002")!.py).toBeCloseTo(10, 10); // min y -> top edge
    expect(byId.get("c003")!.py).toBeCloseTo(90, 10);
    // midpoints stay proportional
    expect(byId.get("c002")!.px).toBeCloseTo(50, 10);
  });

  it("gives each cluster a stable colour", () => {
    const points = scatterLayout(PROJECTION, 100, 100);
    const colours = new Map(points.map((p) => [p.cluster, p.color]));
    expect(colours.size).toBe(3);
    expect(colours.get(1)).toBe(clusterColor(1));
    expect(points[0]!.color).toBe(points[1]!.color); // same cluster, same colour
  });

  it("handles an empty projection", () => {
    expect(scatterLayout({ clusters: 0, champions: [] }, 100, 100)).toEqual([]);
  });
});

describe("coveredClusters", () => {
  it("counts distinct cluster labels among a team's picks", () => {
    const s = state({ picks: { A: { "0": "c000", "1": "c001", "2": "c002" }, B: {} } });
    const covered = coveredClusters(s, "A", PROJECTION);
    expect(covered).toEqual(new Set([1, 2]));
    expect(coverageLabel(covered, PROJECTION.clusters)).toBe("2 of 3 clusters covered");
  });

  it("reports zero coverage for an empty team", () => {
    const covered = coveredClusters(state(), "B", PROJECTION);
    expect(coverageLabel(covered, 5)).toBe("0 of 5 clusters covered");
  });
});

describe("turnOrder", () => {
  it("annotates the acting slot and existing picks", () => {
    const s = state({ picks: { A: { "2": "c003" }, B: {} } });
    const turns = turnOrder(s);
    expect(turns.map((t) => `${t.team}${t.slot}`)).toEqual(["A2", "B0", "B1", "A0"]);
    expect(turns[0]).toMatchObject({ playerId: "A2", champion: "c003", isActing: true });
    expect(turns[1]!.isActing).toBe(false);
    expect(turns[1]!.champion).toBeNull();
  });
});

describe("phaseLabel", () => {
  it("names the acting player during picks", () => {
    expect(phaseLabel(state())).toBe("Pick phase — A2 (team A) to pick");
  });

  it("covers the other phases", () => {
    expect(phaseLabel(state({ phase: "Ban", acting: null }))).toBe("Ban phase");
    expect(phaseLabel(state({ phase: "Complete", acting: null }))).toBe("Draft complete");
  });
});

describe("recommendationRows", () => {
  const candidates: Candidate[] = [
    {
      champion_id: "c003",
      win_probability: 0.6127,
      proficiency_component: 0.9112,
      congruency_after: 4,
      diversity_after: 0.8311,
      explanation: "p(win)=0.613",
    },
    {
      champion_id: "c001",
      win_probability: 0.5901,
      proficiency_component: 0.4,
      congruency_after: 3,
      diversity_after: 0.7,
      explanation: "p(win)=0.590",
    },
  ];

  it("preserves the service order exactly and formats payload values", () => {
    const rows = recommendationRows(candidates);
    expect(rows.map((r) => r.championId)).toEqual(["c003", "c001"]); // no client reordering
    expect(rows[0]).toMatchObject({
      winPct: "61.3%",
      proficiency: "0.911",
      congruency: 4,
      diversity: "0.831",
      explanation: "p(win)=0.613",
    });
  });
});

describe("assignmentChanges", () => {
  it("lists only the slots that change, sorted by slot", () => {
    const changes = assignmentChanges(
      { "0": "x", "1": "y", "2": "z" },
      { "2": "y", "1": "z", "0": "x" },
    );
    expect(changes).toEqual([
      { slot: 1, from: "y", to: "z" },
      { slot: 2, from: "z", to: "y" },
    ]);
  });

  it("is empty when the proposal equals the current assignment", () => {
    expect(assignmentChanges({ "0": "x" }, { "0": "x" })).toEqual([]);
  });
});

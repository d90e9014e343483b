/** Draft board application: wires the service client to the DOM.
 *
 * Fetch-then-render loop: every click posts an action with the current
 * sequence number and re-renders from the authoritative response. Illegal
 * actions surface the service's legality reason inline; stale sequence
 * numbers (409) trigger a silent state refresh.
 */

import {
  ApiError,
  DraftServiceClient,
  type Action,
  type Projection,
  type SessionState,
  type Team,
} from "./api.js";
import { createPoller, LatestState, type Poller } from "./poll.js";
import {
  assignmentChanges,
  coverageLabel,
  coveredClusters,
  phaseLabel,
  recommendationRows,
  scatterLayout,
  turnOrder,
} from "./viewmodel.js";

const MAP_SIZE = 420;

interface Elements {
  banner: HTMLElement;
  phase: HTMLElement;
  pool: HTMLElement;
  bans: HTMLElement;
  order: HTMLElement;
  recommendations: HTMLElement;
  trades: HTMLElement;
  map: HTMLElement;
  coverage: HTMLElement;
}

export class DraftBoardApp {
  private state = new LatestState<SessionState>();
  private projection: Projection | null = null;
  private poller: Poller;
  private selectedCluster: number | null = null;

  constructor(
    private readonly client: DraftServiceClient,
    private readonly sessionId: string,
    private readonly el: Elements,
    pollIntervalMs = 1000,
  ) {
    this.poller = createPoller(
      () => this.refresh(),
      (error) => this.showBanner(`connection lost: ${String(error)} — retrying`, true),
      pollIntervalMs,
    );
  }

  async start(): Promise<void> {
    try {
      this.projection = await this.client.projection();
    } catch (error) {
      this.el.map.textContent = "projection unavailable — reload to retry";
    }
    await this.poller.refresh();
    this.poller.start();
  }

  stop(): void {
    this.poller.stop();
  }

  private async refresh(): Promise<void> {
    const state = await this.client.getSession(this.sessionId);
    if (!this.state.offer(state)) return; // out-of-order response
    this.clearBanner();
    this.render(state);
    if (state.phase === "Pick") {
      const rec = await this.client.recommendations(this.sessionId, 5);
      if (rec.seq === state.seq) this.renderRecommendations(rec.candidates);
    } else {
      this.el.recommendations.textContent =
        state.phase === "Ban" ? "recommendations appear during the pick phase" : "";
    }
    if (state.phase === "Trade") {
      await this.renderTrades(state);
    } else {
      this.el.trades.textContent = "";
    }
  }

  private async submit(action: Action): Promise<void> {
    const state = this.state.get();
    if (state === null) return;
    try {
      const next = await this.client.submitAction(this.sessionId, state.seq, action);
      this.state.offer(next);
      this.clearBanner();
      await this.poller.refresh();
    } catch (error) {
      if (error instanceof ApiError && error.isStaleSequence) {
        await this.poller.refresh(); // someone else acted first: re-sync
      } else if (error instanceof ApiError && error.isIllegalAction) {
        this.showBanner(error.detail, false);
      } else {
        this.showBanner(`request failed: ${String(error)} — retrying`, true);
      }
    }
  }

  // ------------------------------------------------------------- rendering

  private render(state: SessionState): void {
    this.el.phase.textContent = phaseLabel(state);
    this.renderPool(state);
    this.renderBans(state);
    this.renderOrder(state);
    this.renderMap(state);
  }

  private renderPool(state: SessionState): void {
    this.el.pool.replaceChildren();
    for (const champion of state.pool) {
      const button = document.createElement("button");
      button.textContent = champion;
      button.className = "pool-champ";
      button.disabled = state.phase !== "Ban" && state.phase !== "Pick";
      button.addEventListener("click", () => {
        if (state.phase === "Ban") {
          // the service knows whose ban turn it is; send both teams' attempts
          // and let it reject the out-of-turn one with a reason
          const team = this.currentBanTeam(state);
          void this.submit({ kind: "ban", team, champion });
        } else if (state.phase === "Pick" && state.acting) {
          void this.submit({ kind: "pick", team: state.acting.team, champion });
        }
      });
      this.el.pool.appendChild(button);
    }
  }

  private currentBanTeam(state: SessionState): Team {
    const done = state.bans.A.length + state.bans.B.length;
    return done % 2 === 0 ? "A" : "B";
  }

  private renderBans(state: SessionState): void {
    this.el.bans.textContent = `bans — A: ${state.bans.A.join(", ") || "—"} | B: ${
      state.bans.B.join(", ") || "—"
    }`;
  }

  private renderOrder(state: SessionState): void {
    this.el.order.replaceChildren();
    for (const turn of turnOrder(state)) {
      const row = document.createElement("div");
      row.className = turn.isActing ? "turn acting" : "turn";
      row.textContent = `${turn.team}/${turn.playerId}: ${turn.champion ?? "…"}`;
      this.el.order.appendChild(row);
    }
  }

  private renderRecommendations(candidates: Parameters<typeof recommendationRows>[0]): void {
    this.el.recommendations.replaceChildren();
    for (const row of recommendationRows(candidates)) {
      const div = document.createElement("div");
      div.className = "candidate";
      div.textContent = `${row.championId} — win ${row.winPct}, proficiency ${row.proficiency}, covers ${row.congruency} clusters`;
      div.title = row.explanation;
      div.addEventListener("click", () => {
        const state = this.state.get();
        if (state?.phase === "Pick" && state.acting) {
          void this.submit({ kind: "pick", team: state.acting.team, champion: row.championId });
        }
      });
      div.addEventListener("mouseenter", () => {
        this.selectedCluster = this.projectionClusterOf(row.championId);
        const state = this.state.get();
        if (state) this.renderMap(state);
      });
      this.el.recommendations.appendChild(div);
    }
  }

  private projectionClusterOf(championId: string): number | null {
    const entry = this.projection?.champions.find((c) => c.champion_id === championId);
    return entry ? entry.cluster : null;
  }

  private async renderTrades(state: SessionState): Promise<void> {
    this.el.trades.replaceChildren();
    for (const team of ["A", "B"] as const) {
      const payload = await this.client.trades(this.sessionId, team);
      const changes = assignmentChanges(state.picks[team], payload.assignment);
      const div = document.createElement("div");
      const gain = payload.mean_proficiency_gain.toFixed(4);
      div.textContent = changes.length
        ? `team ${team}: ${changes.map((c) => `slot ${c.slot}: ${c.from} → ${c.to}`).join(", ")} (gain ${gain})`
        : `team ${team}: current assignment is optimal`;
      this.el.trades.appendChild(div);
    }
    const finalize = document.createElement("button");
    finalize.textContent = "finalize draft";
    finalize.addEventListener("click", () => void this.submit({ kind: "finalize" }));
    this.el.trades.appendChild(finalize);
  }

  private renderMap(state: SessionState): void {
    if (!this.projection) return;
    const points = scatterLayout(this.projection, MAP_SIZE, MAP_SIZE);
    const svgNs = "http://www.w3.org/2000/svg";
    const svg = document.createElementNS(svgNs, "svg");
    svg.setAttribute("width", String(MAP_SIZE));
    svg.setAttribute("height", String(MAP_SIZE));
    const picked = new Set(
      (["A", "B"] as const).flatMap((t) => Object.values(state.picks[t])),
    );
    for (const point of points) {
      const circle = document.createElementNS(svgNs, "circle");
      circle.setAttribute("cx", String(point.px));
      circle.setAttribute("cy", String(point.py));
      circle.setAttribute(
        "r",
        this.selectedCluster !== null && point.cluster === this.selectedCluster ? "7" : "4",
      );
      circle.setAttribute("fill", point.color);
      circle.setAttribute("opacity", picked.has(point.championId) ? "1.0" : "0.45");
      const title = document.createElementNS(svgNs, "title");
      title.textContent = `${point.championId} (cluster ${point.cluster})`;
      circle.appendChild(title);
      svg.appendChild(circle);
    }
    this.el.map.replaceChildren(svg);

    const acting = state.acting?.team ?? "A";
    const covered = coveredClusters(state, acting, this.projection);
    this.el.coverage.textContent = `team ${acting}: ${coverageLabel(covered, this.projection.clusters)}`;
  }

  // --------------------------------------------------------------- banners

  private showBanner(message: string, transient: boolean): void {
    this.el.banner.textContent = message;
    this.el.banner.className = transient ? "banner network" : "banner illegal";
  }

  private clearBanner(): void {
    this.el.banner.textContent = "";
    this.el.banner.className = "banner";
  }
}

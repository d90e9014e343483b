/** Typed client for the draftlab HTTP service.
 *
 * Every number the UI shows comes straight out of these payloads; the client
 * performs no rule, feature, or probability computation of its own.
 */

export type Team = "A" | "B";
export type Phase = "Ban" | "Pick" | "Trade" | "Complete";

export interface TurnInfo {
  team: Team;
  slot: number;
  player_id: string;
}

export interface SessionState {
  session_id: string;
  seq: number;
  phase: Phase;
  pool: string[];
  bans: Record<Team, string[]>;
  picks: Record<Team, Record<string, string>>;
  pick_sequence: [Team, number][];
  rosters: Record<Team, string[]>;
  sides: Record<Team, "Top" | "Bottom">;
  acting: TurnInfo | null;
}

export interface Action {
  kind: "ban" | "pick" | "swap" | "finalize";
  team?: Team;
  champion?: string;
  slot_a?: number;
  slot_b?: number;
}

export interface Candidate {
  champion_id: string;
  win_probability: number;
  proficiency_component: number;
  congruency_after: number;
  diversity_after: number;
  explanation: string;
}

export interface RecommendationPayload {
  session_id: string;
  seq: number;
  candidates: Candidate[];
}

export interface TradePayload {
  session_id: string;
  seq: number;
  team: Team;
  assignment: Record<string, string>;
  mean_proficiency_gain: number;
}

export interface ProjectionChampion {
  champion_id: string;
  x: number;
  y: number;
  cluster: number;
}

export interface Projection {
  clusters: number;
  champions: ProjectionChampion[];
}

export interface ActionLogEntry {
  session_id: string;
  seq: number;
  actor: string;
  action: Action;
  timestamp: number;
}

export interface CreateSessionRequest {
  players: Record<Team, string[]>;
  sides: Record<Team, "Top" | "Bottom">;
  seed?: number;
  pick_order?: "snake" | "alternate";
  pool?: string[];
}

/** Error carrying the HTTP status and the service's `detail` message. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }

  get isStaleSequence(): boolean {
    return this.status === 409;
  }

  get isIllegalAction(): boolean {
    return this.status === 422;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class DraftServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; sessions: number }> {
    return this.request("/health");
  }

  projection(): Promise<Projection> {
    return this.request("/projection");
  }

  createSession(body: CreateSessionRequest): Promise<SessionState> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}`);
  }

  submitAction(sessionId: string, seq: number, action: Action): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}/actions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ seq, action }),
    });
  }

  recommendations(sessionId: string, topN = 5): Promise<RecommendationPayload> {
    return this.request(`/sessions/${sessionId}/recommendations?top_n=${topN}`);
  }

  trades(sessionId: string, team: Team): Promise<TradePayload> {
    return this.request(`/sessions/${sessionId}/trades?team=${team}`);
  }

  log(sessionId: string): Promise<{ session_id: string; entries: ActionLogEntry[] }> {
    return this.request(`/sessions/${sessionId}/log`);
  }
}

/** Entry point: create or resume a session and mount the draft board. */

import { DraftServiceClient } from "./api.js";
import { DraftBoardApp } from "./app.js";

const BASE_URL = (window as unknown as { DRAFTLAB_URL?: string }).DRAFTLAB_URL ?? "";

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id} in index.html`);
  return el;
}

async function boot(): Promise<void> {
  const client = new DraftServiceClient(BASE_URL);
  const params = new URLSearchParams(window.location.search);
  let sessionId = params.get("session");

  if (!sessionId) {
    const players = params.get("players");
    if (!players) {
      byId("banner").textContent =
        "open with ?session=<id> or ?players=A0,A1,A2,A3,A4,B0,B1,B2,B3,B4";
      return;
    }
    const ids = players.split(",");
    const state = await client.createSession({
      players: { A: ids.slice(0, 5), B: ids.slice(5, 10) },
      sides: { A: "Top", B: "Bottom" },
      seed: Number(params.get("seed") ?? 0),
    });
    sessionId = state.session_id;
    params.set("session", sessionId);
    window.history.replaceState(null, "", `?${params.toString()}`);
  }

  const app = new DraftBoardApp(client, sessionId, {
    banner: byId("banner"),
    phase: byId("phase"),
    pool: byId("pool"),
    bans: byId("bans"),
    order: byId("order"),
    recommendations: byId("recommendations"),
    trades: byId("trades"),
    map: byId("map"),
    coverage: byId("coverage"),
  });
  await app.start();
}

document.addEventListener("DOMContentLoaded", () => {
  void boot();
});

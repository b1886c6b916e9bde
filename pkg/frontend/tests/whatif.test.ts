/** What-if safety against the fixture backend: cancel leaves the server
 * config untouched; committing w_S=0 re-ranks exactly as the server
 * recomputed. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { configView, previewFinal, previewRankDeltas, WhatIfEditor, validateEdits } from "../src/views/config.js";
import { startFixtureBackend, type Backend } from "./backend.js";

let backend: Backend;
let api: ApiClient;

beforeAll(async () => {
  backend = await startFixtureBackend();
  api = new ApiClient(backend.baseUrl);
});

afterAll(() => backend?.stop());

function container(): HTMLElement {
  const node = document.createElement("div");
  document.body.appendChild(node);
  return node;
}

describe("what-if flow", () => {
  it("editing then cancelling leaves the server config byte-identical", async () => {
    const before = await api.raw("/api/config/scoring");

    const requests: { method: string; path: string }[] = [];
    const spyingFetch: FetchLike = (input, init) => {
      requests.push({ method: init?.method ?? "GET", path: String(input) });
      return fetch(input, init);
    };
    const spiedApi = new ApiClient(backend.baseUrl, spyingFetch);

    const target = container();
    const editor = await configView(target, spiedApi);

    const wsInput = target.querySelector<HTMLInputElement>('input[name="w_S"]')!;
    wsInput.value = "0.1";
    target.querySelector<HTMLButtonElement>(".preview-button")!.click();
    expect(target.querySelector(".preview-note")?.textContent).toContain("preview");
    expect(editor.dirty).toBe(true);

    target.querySelector<HTMLButtonElement>(".cancel-button")!.click();
    expect(editor.dirty).toBe(false);
    expect(wsInput.value).toBe("0.3");
    // No mutating request ever left the client.
    expect(requests.filter((r) => r.method !== "GET")).toEqual([]);

    const after = await api.raw("/api/config/scoring");
    expect(after).toBe(before);
  });

  it("client-side validation rejects a negative weight with no state change", async () => {
    const editor = new WhatIfEditor(api);
    await editor.load();
    const problem = editor.edit({ w_S: -0.2 });
    expect(problem).toMatch(/non-negative/);
    expect(editor.edited!.w_S).toBe(0.3);
    expect(validateEdits({ ...editor.edited!, threshold_medium: 20 })).toMatch(/thresholds/);
  });

  it("identity edit previews zero rank deltas", async () => {
    const cards = await api.listThreats();
    const config = await api.getScoringConfig();
    for (const delta of previewRankDeltas(cards, config)) {
      expect(delta.newRank).toBe(delta.oldRank);
    }
    // Preview formula reproduces the server's score under the current config.
    for (const card of cards) {
      expect(previewFinal(card, config)).toBeCloseTo(card.scored.final, 9);
    }
  });

  it("committing w_S=0 re-ranks identically to the server recomputation", async () => {
    const target = container();
    await configView(target, api);

    const wsInput = target.querySelector<HTMLInputElement>('input[name="w_S"]')!;
    wsInput.value = "0";
    target.querySelector<HTMLButtonElement>(".apply-button")!.click();
    // Apply PUTs then refetches; wait for the ranked list to appear.
    await new Promise<void>((resolve, reject) => {
      const deadline = Date.now() + 10_000;
      const poll = () => {
        if (target.querySelector(".ranked-threat")) return resolve();
        if (Date.now() > deadline) return reject(new Error("ranked list never rendered"));
        setTimeout(poll, 50);
      };
      poll();
    });

    const applied = await api.getScoringConfig();
    expect(applied.w_S).toBe(0);

    const raw = await api.raw("/api/threats");
    const serverCards = await api.listThreats();
    const rows = [...target.querySelectorAll<HTMLElement>(".ranked-threat")];
    expect(rows.map((r) => r.dataset.cardId)).toEqual(serverCards.map((c) => c.id));
    const rawFinals = [...raw.matchAll(/"final":\s*(-?[0-9][0-9.eE+-]*)/g)].map((m) => m[1]);
    expect(rows.map((r) => r.dataset.final)).toEqual(rawFinals);

    // Independent hand evaluation in the same IEEE-754 arithmetic the
    // server uses: dropping the success-rate term from the fixture
    // card's factors (L=6, I=0.75, D=1.0) under the semantic
    // multiplier.
    const expected = Math.min(10, (0.35 * (6 / 7) + 0.2 * 0.75 + 0.15 * 1.0) * 1.2 * 10);
    expect(Number(rows[0].dataset.final)).toBe(expected);
  });
});

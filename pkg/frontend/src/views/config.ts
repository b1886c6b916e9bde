/** Scoring what-if editor.
 *
 * Edits stay local until an explicit Apply: the preview panel shows
 * hypothetical re-ranking computed from already-fetched card factors
 * and multipliers (clearly labeled as a preview, never displayed as
 * truth), Apply PUTs the config and refetches the server-ranked list,
 * and Cancel discards local edits without any network call.
 */

import { ApiError, type ApiClient } from "../api.js";
import { fmtScore } from "../format.js";
import type { ScoringConfig, ThreatCard } from "../types.js";
import { clear, el } from "../ui.js";

const WEIGHT_FIELDS = ["w_L", "w_S", "w_I", "w_D"] as const;
const ALL_FIELDS: (keyof ScoringConfig)[] = [
  "w_L",
  "w_S",
  "w_I",
  "w_D",
  "multiplier_semantic",
  "multiplier_chaining",
  "multiplier_observability",
  "threshold_critical",
  "threshold_high",
  "threshold_medium",
];

export function validateEdits(config: ScoringConfig): string | null {
  for (const field of WEIGHT_FIELDS) {
    if (config[field] < 0) return `weight ${field} must be non-negative`;
  }
  if (!(config.threshold_critical > config.threshold_high && config.threshold_high > config.threshold_medium && config.threshold_medium > 0)) {
    return "thresholds must satisfy critical > high > medium > 0";
  }
  return null;
}

/** Hypothetical final score under edited weights, reusing the card's
 * fetched factors and multiplier. Preview only. */
export function previewFinal(card: ThreatCard, config: ScoringConfig): number {
  const base =
    config.w_L * (card.factors.L / 7) +
    config.w_S * card.factors.S +
    config.w_I * card.factors.I +
    config.w_D * card.factors.D;
  return Math.min(10.0, base * card.scored.multiplier * 10.0);
}

export interface RankDelta {
  cardId: string;
  oldRank: number;
  newRank: number;
}

export function previewRankDeltas(cards: ThreatCard[], config: ScoringConfig): RankDelta[] {
  const reranked = [...cards]
    .map((card) => ({ card, predicted: previewFinal(card, config) }))
    .sort((a, b) => b.predicted - a.predicted || a.card.id.localeCompare(b.card.id));
  return cards.map((card, oldIdx) => ({
    cardId: card.id,
    oldRank: oldIdx + 1,
    newRank: reranked.findIndex((r) => r.card.id === card.id) + 1,
  }));
}

export class WhatIfEditor {
  saved: ScoringConfig | null = null;
  edited: ScoringConfig | null = null;

  constructor(private readonly api: ApiClient) {}

  async load(): Promise<ScoringConfig> {
    this.saved = await this.api.getScoringConfig();
    this.edited = { ...this.saved };
    return this.saved;
  }

  edit(changes: Partial<ScoringConfig>): string | null {
    if (!this.edited) throw new Error("editor not loaded");
    const candidate = { ...this.edited, ...changes };
    const problem = validateEdits(candidate);
    if (problem) return problem; // rejected client-side, no state change
    this.edited = candidate;
    return null;
  }

  get dirty(): boolean {
    if (!this.saved || !this.edited) return false;
    return ALL_FIELDS.some((field) => this.saved![field] !== this.edited![field]);
  }

  /** Discard local edits; deliberately performs no network call. */
  cancel(): void {
    if (this.saved) this.edited = { ...this.saved };
  }

  /** Commit: PUT the edited config, then the caller refetches threats
   * so every displayed number is the server's recomputation. */
  async apply(): Promise<ScoringConfig> {
    if (!this.edited) throw new Error("editor not loaded");
    const applied = await this.api.putScoringConfig(this.edited);
    this.saved = applied;
    this.edited = { ...applied };
    return applied;
  }
}

export async function configView(container: HTMLElement, api: ApiClient): Promise<WhatIfEditor> {
  clear(container);
  const editor = new WhatIfEditor(api);
  await editor.load();
  const cards = await api.listThreats();

  const form = el("form", "config-form");
  form.addEventListener("submit", (event) => event.preventDefault());
  const inputs = new Map<keyof ScoringConfig, HTMLInputElement>();
  for (const field of ALL_FIELDS) {
    const label = el("label", "config-field", `${field} `);
    const input = el("input") as HTMLInputElement;
    input.type = "number";
    input.step = "0.01";
    input.name = field;
    input.value = String(editor.edited![field]);
    inputs.set(field, input);
    label.appendChild(input);
    form.appendChild(label);
  }
  const message = el("div", "config-message");
  const previewPanel = el("div", "preview-panel");
  const threatsPanel = el("div", "config-threats");

  const collectEdits = (): Partial<ScoringConfig> => {
    const changes: Partial<ScoringConfig> = {};
    for (const [field, input] of inputs) {
      changes[field] = Number(input.value);
    }
    return changes;
  };

  const previewButton = el("button", "preview-button", "Preview re-ranking");
  previewButton.type = "button";
  previewButton.addEventListener("click", () => {
    const problem = editor.edit(collectEdits());
    message.textContent = problem ?? "";
    if (problem) return;
    previewPanel.replaceChildren(el("div", "preview-note", "preview (not committed)"));
    for (const delta of previewRankDeltas(cards, editor.edited!)) {
      const row = el("div", "rank-delta", `${delta.cardId}: ${delta.oldRank} -> ${delta.newRank}`);
      row.dataset.cardId = delta.cardId;
      row.dataset.delta = String(delta.oldRank - delta.newRank);
      previewPanel.appendChild(row);
    }
  });

  const applyButton = el("button", "apply-button", "Apply");
  applyButton.type = "button";
  applyButton.addEventListener("click", () => {
    void (async () => {
      const problem = editor.edit(collectEdits());
      message.textContent = problem ?? "";
      if (problem) return;
      try {
        await editor.apply();
      } catch (err) {
        message.textContent = err instanceof ApiError ? err.detail : String(err);
        return;
      }
      previewPanel.replaceChildren();
      const refreshed = await api.listThreats();
      threatsPanel.replaceChildren();
      refreshed.forEach((card, idx) => {
        const row = el("div", "ranked-threat", `${idx + 1}. ${card.title} (${fmtScore(card.scored.final)})`);
        row.dataset.cardId = card.id;
        row.dataset.final = fmtScore(card.scored.final);
        threatsPanel.appendChild(row);
      });
    })();
  });

  const cancelButton = el("button", "cancel-button", "Cancel");
  cancelButton.type = "button";
  cancelButton.addEventListener("click", () => {
    editor.cancel();
    for (const [field, input] of inputs) {
      input.value = String(editor.edited![field]);
    }
    previewPanel.replaceChildren();
    message.textContent = "";
  });

  form.appendChild(previewButton);
  form.appendChild(applyButton);
  form.appendChild(cancelButton);
  container.appendChild(form);
  container.appendChild(message);
  container.appendChild(previewPanel);
  container.appendChild(threatsPanel);
  return editor;
}

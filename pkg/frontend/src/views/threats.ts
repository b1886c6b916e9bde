/** Threat card list: scores, levels, taxonomy and framework mappings,
 * all exactly as the API serialized them. */

import type { ApiClient } from "../api.js";
import { fmtScore } from "../format.js";
import type { ThreatCard } from "../types.js";
import { clear, el, errorBanner } from "../ui.js";

export function renderThreats(container: HTMLElement, cards: ThreatCard[]): void {
  clear(container);
  const list = el("div", "threat-list");
  if (cards.length === 0) {
    list.appendChild(el("div", "empty-state", "no classified threats yet"));
  }
  cards.forEach((card, rank) => {
    const row = el("div", "threat-card");
    row.dataset.cardId = card.id;
    row.dataset.rank = String(rank + 1);
    row.appendChild(el("h3", "threat-title", card.title));
    const score = el("span", `threat-score level-${card.scored.level.toLowerCase()}`, fmtScore(card.scored.final));
    score.dataset.final = fmtScore(card.scored.final);
    row.appendChild(score);
    row.appendChild(el("span", "threat-level", card.scored.level));
    row.appendChild(el("span", "threat-ids", card.mcp_ids.join(", ")));
    row.appendChild(el("span", "threat-stride", card.stride));
    row.appendChild(
      el("span", "threat-owasp", [...card.owasp_llm, ...card.owasp_agentic].join(", ")),
    );
    if (card.upd_chain) {
      row.appendChild(el("span", "threat-chain", card.upd_chain.edges.join(" -> ")));
    }
    row.appendChild(el("p", "threat-summary", card.summary));
    list.appendChild(row);
  });
  container.appendChild(list);
}

export async function threatsView(
  container: HTMLElement,
  api: ApiClient,
  filters: { level?: string; stride?: string } = {},
): Promise<void> {
  try {
    renderThreats(container, await api.listThreats(filters));
  } catch (err) {
    errorBanner(container, `failed to load threats: ${(err as Error).message}`, false);
  }
}

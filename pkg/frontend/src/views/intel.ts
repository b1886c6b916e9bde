/** Intelligence items view: collected items with source metadata and
 * model-assigned relevance. */

import type { ApiClient } from "../api.js";
import { fmtScore } from "../format.js";
import type { IntelItem } from "../types.js";
import { clear, el, errorBanner } from "../ui.js";

export function renderIntel(container: HTMLElement, items: IntelItem[], sourceFilter?: string): void {
  clear(container);
  const list = el("div", "intel-list");
  const visible = sourceFilter ? items.filter((i) => i.source_type === sourceFilter) : items;
  if (visible.length === 0) {
    list.appendChild(el("div", "empty-state", "no intelligence items collected yet"));
  }
  for (const item of visible) {
    const row = el("div", "intel-item");
    row.dataset.itemId = item.id;
    row.appendChild(el("h3", "intel-title", item.title));
    row.appendChild(el("span", "intel-source", item.source_type));
    const relevance = el(
      "span",
      "intel-relevance",
      item.relevance === null ? "unscored" : fmtScore(item.relevance),
    );
    if (item.relevance !== null) relevance.dataset.relevance = fmtScore(item.relevance);
    row.appendChild(relevance);
    const link = el("a", "intel-link", item.source_url);
    link.setAttribute("href", item.source_url);
    row.appendChild(link);
    row.appendChild(el("p", "intel-content", item.content));
    list.appendChild(row);
  }
  container.appendChild(list);
}

export async function intelView(container: HTMLElement, api: ApiClient, sourceFilter?: string): Promise<void> {
  try {
    renderIntel(container, await api.listIntel(), sourceFilter);
  } catch (err) {
    errorBanner(container, `failed to load intelligence items: ${(err as Error).message}`, false);
  }
}

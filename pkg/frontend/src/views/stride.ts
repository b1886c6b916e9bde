/** STRIDE distribution: one bar per category, counts straight from the
 * projection endpoint. */

import type { ApiClient } from "../api.js";
import { fmtCount } from "../format.js";
import type { StrideDistribution } from "../types.js";
import { STRIDE_CATEGORIES } from "../types.js";
import { clear, el, errorBanner } from "../ui.js";

const BAR_SCALE_PX = 24;

export function renderStride(container: HTMLElement, distribution: StrideDistribution): void {
  clear(container);
  const chart = el("div", "stride-chart");
  for (const category of STRIDE_CATEGORIES) {
    const count = distribution.counts[category] ?? 0;
    const row = el("div", "stride-row");
    row.appendChild(el("span", "stride-label", category));
    const bar = el("div", "stride-bar");
    bar.style.width = `${count * BAR_SCALE_PX}px`;
    bar.dataset.count = fmtCount(count);
    row.appendChild(bar);
    row.appendChild(el("span", "stride-count", fmtCount(count)));
    chart.appendChild(row);
  }
  chart.appendChild(el("div", "stride-total", `total: ${fmtCount(distribution.total)}`));
  container.appendChild(chart);
}

export async function strideView(container: HTMLElement, api: ApiClient): Promise<void> {
  try {
    renderStride(container, await api.stride());
  } catch (err) {
    errorBanner(container, `failed to load STRIDE distribution: ${(err as Error).message}`, false);
  }
}

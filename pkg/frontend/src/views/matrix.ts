/** Threat matrix heatmap: 4 attack-surface rows x 17 category columns,
 * shading proportional to cell intensity (the sum of risk scores the
 * backend computed; nothing is re-derived here). */

import type { ApiClient } from "../api.js";
import { fmtScore } from "../format.js";
import type { MatrixProjection } from "../types.js";
import { clear, el, errorBanner } from "../ui.js";

const SURFACE_LABELS = ["ServerAPIs", "ToolMetadata", "RuntimeFlow", "Transport"];

/** Shading alpha in [0.05, 1]: zero cells get the floor, the hottest
 * cell gets full opacity, strictly monotone in intensity. */
export function shadeAlpha(intensity: number, maxIntensity: number): number {
  if (maxIntensity <= 0 || intensity <= 0) return 0.05;
  return 0.05 + 0.95 * (intensity / maxIntensity);
}

export function renderMatrix(
  container: HTMLElement,
  projection: MatrixProjection,
  onCellClick?: (threatIds: string[]) => void,
): void {
  clear(container);
  const maxIntensity = Math.max(...projection.grid.flat().map((cell) => cell.intensity));
  const table = el("table", "matrix");
  projection.grid.forEach((row, surfaceIdx) => {
    const tr = el("tr");
    tr.appendChild(el("th", "surface-label", SURFACE_LABELS[surfaceIdx]));
    row.forEach((cell) => {
      const td = el("td", "matrix-cell", fmtScore(cell.intensity));
      td.style.backgroundColor = `rgba(200, 30, 30, ${shadeAlpha(cell.intensity, maxIntensity)})`;
      td.dataset.intensity = fmtScore(cell.intensity);
      td.dataset.threats = cell.threat_ids.join(",");
      td.addEventListener("click", () => {
        renderCellThreats(container, cell.threat_ids);
        onCellClick?.(cell.threat_ids);
      });
      tr.appendChild(td);
    });
    table.appendChild(tr);
  });
  container.appendChild(table);
}

function renderCellThreats(container: HTMLElement, threatIds: string[]): void {
  container.querySelector(".cell-threats")?.remove();
  const list = el("ul", "cell-threats");
  if (threatIds.length === 0) {
    list.appendChild(el("li", "empty", "no threats mapped to this cell"));
  }
  for (const id of threatIds) {
    list.appendChild(el("li", "cell-threat-id", id));
  }
  container.appendChild(list);
}

export async function matrixView(container: HTMLElement, api: ApiClient): Promise<void> {
  try {
    renderMatrix(container, await api.matrix());
  } catch (err) {
    const stale = container.querySelector(".matrix") !== null;
    errorBanner(container, `failed to load matrix: ${(err as Error).message}`, stale);
  }
}

/** Run control: trigger pipeline runs, poll status, show per-stage
 * counts and per-source errors. A concurrent-run rejection from the
 * backend surfaces as a notice, not an error. */

import { ApiError, type ApiClient } from "../api.js";
import { fmtCount } from "../format.js";
import type { RunRecord } from "../types.js";
import { el, errorBanner } from "../ui.js";

export const RUN_KINDS = ["Gather", "Analyze", "Plan", "Full"] as const;

const TERMINAL = new Set(["Succeeded", "PartialFailure", "Failed"]);

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export function renderRunRecord(target: HTMLElement, record: RunRecord): void {
  target.replaceChildren();
  target.dataset.runId = record.run_id;
  target.appendChild(el("div", `run-status status-${record.status.toLowerCase()}`, record.status));
  const counts = el("ul", "run-counts");
  for (const [key, value] of Object.entries(record.counts).sort()) {
    const li = el("li", "run-count", `${key}: ${typeof value === "number" ? fmtCount(value) : value}`);
    li.dataset.count = String(value);
    li.dataset.key = key;
    counts.appendChild(li);
  }
  target.appendChild(counts);
  if (record.errors.length > 0) {
    const errors = el("ul", "run-errors");
    for (const message of record.errors) {
      errors.appendChild(el("li", "run-error", message));
    }
    target.appendChild(errors);
  }
}

export async function triggerAndWatch(
  container: HTMLElement,
  api: ApiClient,
  kind: string,
  pollIntervalMs = 1000,
): Promise<RunRecord | null> {
  container.querySelector(".run-notice")?.remove();
  let record: RunRecord;
  try {
    record = await api.triggerRun(kind);
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      container.prepend(el("div", "run-notice", `run rejected: ${err.detail}`));
      return null;
    }
    errorBanner(container, `run failed to start: ${(err as Error).message}`, false);
    return null;
  }

  let monitor = container.querySelector<HTMLElement>(".run-monitor");
  if (!monitor) {
    monitor = el("div", "run-monitor");
    container.appendChild(monitor);
  }
  renderRunRecord(monitor, record);
  while (!TERMINAL.has(record.status)) {
    await sleep(pollIntervalMs);
    record = await api.getRun(record.run_id);
    renderRunRecord(monitor, record);
  }
  return record;
}

export function runsView(container: HTMLElement, api: ApiClient, pollIntervalMs = 1000): void {
  container.replaceChildren();
  const controls = el("div", "run-controls");
  for (const kind of RUN_KINDS) {
    const button = el("button", "run-trigger", `Run ${kind}`);
    button.dataset.kind = kind;
    button.addEventListener("click", () => {
      void triggerAndWatch(container, api, kind, pollIntervalMs);
    });
    controls.appendChild(button);
  }
  container.appendChild(controls);
  void api.listRuns().then((runs) => {
    if (runs.length > 0) {
      const monitor = el("div", "run-monitor");
      renderRunRecord(monitor, runs[0]);
      container.appendChild(monitor);
    }
  });
}

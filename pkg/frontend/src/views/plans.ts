/** Risk plan view: prioritized entries with detections and mitigations. */

import type { ApiClient } from "../api.js";
import { fmtScore } from "../format.js";
import type { RiskPlan } from "../types.js";
import { clear, el, errorBanner } from "../ui.js";

export function renderPlans(container: HTMLElement, plans: RiskPlan[]): void {
  clear(container);
  if (plans.length === 0) {
    container.appendChild(el("div", "empty-state", "no risk plans yet"));
    return;
  }
  for (const plan of plans) {
    const section = el("section", "plan");
    section.dataset.planId = plan.id;
    const heading = el("h2", "plan-heading", `Plan ${plan.id}`);
    if (plan.degraded) heading.appendChild(el("span", "degraded-badge", "degraded"));
    section.appendChild(heading);
    for (const entry of plan.entries) {
      const block = el("div", "plan-entry");
      block.dataset.cardId = entry.threat_card_id;
      const score = el("span", "plan-score", fmtScore(entry.final_score));
      score.dataset.final = fmtScore(entry.final_score);
      block.appendChild(score);
      block.appendChild(el("span", "plan-card-id", entry.threat_card_id));
      if (entry.unavailable) block.appendChild(el("span", "plan-unavailable", "plan unavailable"));
      const detections = el("ul", "plan-detections");
      for (const method of entry.detection_methods) {
        detections.appendChild(el("li", "detection", method));
      }
      block.appendChild(detections);
      const mitigations = el("ul", "plan-mitigations");
      for (const mitigation of entry.mitigations) {
        mitigations.appendChild(
          el("li", `mitigation priority-${mitigation.priority.toLowerCase()}`, `[${mitigation.priority}/${mitigation.effort}] ${mitigation.text}`),
        );
      }
      block.appendChild(mitigations);
      block.appendChild(el("div", "plan-refs", entry.framework_refs.join(", ")));
      section.appendChild(block);
    }
    container.appendChild(section);
  }
}

export async function plansView(container: HTMLElement, api: ApiClient): Promise<void> {
  try {
    renderPlans(container, await api.listPlans());
  } catch (err) {
    errorBanner(container, `failed to load plans: ${(err as Error).message}`, false);
  }
}

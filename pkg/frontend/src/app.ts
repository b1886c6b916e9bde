/** Dashboard entry point: navigation across the seven views. */

import { ApiClient } from "./api.js";
import { ViewState, VIEWS, type View } from "./state.js";
import { el } from "./ui.js";
import { configView } from "./views/config.js";
import { graphView } from "./views/graph.js";
import { intelView } from "./views/intel.js";
import { landscapeView } from "./views/landscape.js";
import { matrixView } from "./views/matrix.js";
import { plansView } from "./views/plans.js";
import { runsView } from "./views/runs.js";
import { strideView } from "./views/stride.js";
import { threatsView } from "./views/threats.js";

export function mountDashboard(root: HTMLElement, baseUrl: string): ViewState {
  const api = new ApiClient(baseUrl);
  const state = new ViewState();

  const nav = el("nav", "nav");
  const content = el("main", "content");
  const threatsPane = el("aside", "threats-pane");

  const show = (view: View) => {
    state.setView(view);
    nav.querySelectorAll("button").forEach((b) => b.classList.toggle("active", b.dataset.view === view));
    content.replaceChildren();
    switch (view) {
      case "Intel":
        void intelView(content, api, state.filters.source);
        break;
      case "Matrix":
        void matrixView(content, api);
        break;
      case "Landscape":
        void landscapeView(content, api);
        break;
      case "Graph":
        void graphView(content, api);
        break;
      case "Plans":
        void plansView(content, api);
        break;
      case "Stride":
        void strideView(content, api);
        break;
      case "Config":
        void configView(content, api);
        break;
    }
  };

  for (const view of VIEWS) {
    const button = el("button", "nav-button", view);
    button.dataset.view = view;
    button.addEventListener("click", () => show(view));
    nav.appendChild(button);
  }
  const runPane = el("section", "run-pane");
  runsView(runPane, api);

  root.replaceChildren(nav, runPane, content, threatsPane);
  void threatsView(threatsPane, api, { level: state.filters.level, stride: state.filters.stride });
  show(state.activeView);
  return state;
}

declare global {
  interface Window {
    MCPINTEL_API_BASE?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountDashboard(
    document.getElementById("app") as HTMLElement,
    window.MCPINTEL_API_BASE ?? "http://127.0.0.1:8787",
  );
}

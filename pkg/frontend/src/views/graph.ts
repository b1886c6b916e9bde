/** Knowledge graph viewer: force-directed SVG with node color by kind;
 * clicking a node fetches its CHAINS_INTO closure from the reachability
 * endpoint and highlights it. Oversized graphs switch to a paginated
 * neighborhood mode instead of drawing everything. */

import type { ApiClient } from "../api.js";
import { forceLayout } from "../layout.js";
import type { GraphEdge, GraphNode } from "../types.js";
import { clear, el, errorBanner } from "../ui.js";

export const KIND_COLORS: Record<string, string> = {
  IntelligenceItem: "#888888",
  ThreatEntity: "#cc3333",
  McpThreatId: "#7a33cc",
  CveIdentifier: "#e6a817",
  Tool: "#3366cc",
  Mitigation: "#2e8b57",
};

export const MAX_DRAWN_ELEMENTS = 5000;
const SVG_NS = "http://www.w3.org/2000/svg";

export async function highlightReachable(container: HTMLElement, api: ApiClient, entry: string): Promise<void> {
  const result = await api.reachable(entry);
  const reachable = new Set(result.reachable);
  container.querySelectorAll<SVGCircleElement>("circle[data-node-id]").forEach((circle) => {
    const id = circle.dataset.nodeId!;
    circle.classList.toggle("highlighted", reachable.has(id));
    circle.classList.toggle("entry", id === entry);
  });
}

function neighborhood(nodes: GraphNode[], edges: GraphEdge[], centerId: string, limit: number) {
  const keep = new Set([centerId]);
  for (const edge of edges) {
    if (keep.size >= limit) break;
    if (edge.src === centerId) keep.add(edge.dst);
    if (edge.dst === centerId) keep.add(edge.src);
  }
  return {
    nodes: nodes.filter((n) => keep.has(n.id)),
    edges: edges.filter((e) => keep.has(e.src) && keep.has(e.dst)),
  };
}

export function renderGraph(
  container: HTMLElement,
  nodes: GraphNode[],
  edges: GraphEdge[],
  api: ApiClient,
  centerId?: string,
): void {
  clear(container);
  if (nodes.length === 0) {
    container.appendChild(el("div", "empty-state", "knowledge graph is empty — run a pipeline first"));
    return;
  }

  if (nodes.length + edges.length > MAX_DRAWN_ELEMENTS) {
    const center = centerId ?? nodes[0].id;
    const page = neighborhood(nodes, edges, center, 200);
    container.appendChild(
      el("div", "neighborhood-note", `graph too large (${nodes.length + edges.length} elements); showing neighborhood of ${center}`),
    );
    nodes = page.nodes;
    edges = page.edges;
  }

  const positions = new Map(forceLayout(nodes.map((n) => n.id), edges).map((n) => [n.id, n]));
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 800 600");
  svg.classList.add("graph-canvas");

  for (const edge of edges) {
    const a = positions.get(edge.src)!;
    const b = positions.get(edge.dst)!;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("data-kind", edge.kind);
    line.classList.add("graph-edge");
    svg.appendChild(line);
  }

  for (const node of nodes) {
    const pos = positions.get(node.id)!;
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(pos.x));
    circle.setAttribute("cy", String(pos.y));
    circle.setAttribute("r", "10");
    circle.setAttribute("fill", KIND_COLORS[node.kind] ?? "#444");
    circle.dataset.nodeId = node.id;
    circle.dataset.kind = node.kind;
    circle.addEventListener("click", () => {
      void highlightReachable(container, api, node.id);
    });
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${node.canonical_label} (${node.kind})`;
    circle.appendChild(title);
    svg.appendChild(circle);
  }
  container.appendChild(svg);
}

export async function graphView(container: HTMLElement, api: ApiClient): Promise<void> {
  try {
    const [nodes, edges] = await Promise.all([api.graphNodes(), api.graphEdges()]);
    renderGraph(container, nodes.nodes, edges.edges, api);
  } catch (err) {
    errorBanner(container, `failed to load graph: ${(err as Error).message}`, false);
  }
}

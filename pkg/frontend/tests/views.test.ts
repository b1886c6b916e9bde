/** Headless view behavior with a mocked API: shading monotonicity,
 * fallback rendering, graph interaction, run control and state
 * validation. */

import { describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { fmtCount, fmtScore } from "../src/format.js";
import { forceLayout } from "../src/layout.js";
import { ViewState } from "../src/state.js";
import type { GraphEdge, GraphNode, LandscapeProjection, MatrixProjection } from "../src/types.js";
import { renderGraph, highlightReachable, MAX_DRAWN_ELEMENTS } from "../src/views/graph.js";
import { renderLandscapeFallback, webglAvailable } from "../src/views/landscape.js";
import { matrixView, renderMatrix, shadeAlpha } from "../src/views/matrix.js";
import { triggerAndWatch } from "../src/views/runs.js";
import { renderStride } from "../src/views/stride.js";

function mockFetch(routes: Record<string, { status?: number; body: unknown }>): FetchLike {
  return async (input, init) => {
    const url = new URL(String(input));
    const key = `${init?.method ?? "GET"} ${url.pathname}`;
    const route = routes[key];
    if (!route) throw new Error(`no mock for ${key}`);
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  };
}

function container(): HTMLElement {
  const node = document.createElement("div");
  document.body.appendChild(node);
  return node;
}

function emptyGrid<T>(fill: T): T[][] {
  return Array.from({ length: 4 }, () => Array.from({ length: 17 }, () => structuredClone(fill)));
}

describe("formatting", () => {
  it("mirrors the backend float serialization", () => {
    expect(fmtScore(10)).toBe("10.0");
    expect(fmtScore(0)).toBe("0.0");
    expect(fmtScore(0.94)).toBe("0.94");
    expect(fmtScore(11.5)).toBe("11.5");
    expect(fmtCount(3)).toBe("3");
  });
});

describe("view state", () => {
  it("validates filters against API enums", () => {
    const state = new ViewState();
    state.setFilters({ level: "High", stride: "Tampering", source: "Rss" });
    expect(() => state.setFilters({ level: "Extreme" })).toThrow(/invalid level/);
    expect(() => state.setFilters({ stride: "Phishing" })).toThrow(/invalid stride/);
    expect(() => state.setFilters({ source: "Twitter" })).toThrow(/invalid source/);
  });
});

describe("matrix heatmap", () => {
  it("all-zero grid renders uniform minimum shading", () => {
    const projection: MatrixProjection = { grid: emptyGrid({ intensity: 0, threat_ids: [] }) };
    const target = container();
    renderMatrix(target, projection);
    const alphas = new Set(
      [...target.querySelectorAll<HTMLElement>(".matrix-cell")].map((c) => c.style.backgroundColor),
    );
    expect(alphas.size).toBe(1);
  });

  it("single hot cell gets maximum shading on exactly one cell", () => {
    const grid = emptyGrid({ intensity: 0, threat_ids: [] as string[] });
    grid[1][3] = { intensity: 10.0, threat_ids: ["card-x"] };
    const target = container();
    renderMatrix(target, { grid });
    const cells = [...target.querySelectorAll<HTMLElement>(".matrix-cell")];
    // jsdom collapses rgba(...,1) to rgb(...); full opacity means the
    // style no longer carries an alpha channel.
    const hot = cells.filter((c) => !c.style.backgroundColor.startsWith("rgba"));
    expect(hot).toHaveLength(1);
    expect(hot[0].dataset.intensity).toBe("10.0");
  });

  it("shading is monotone in intensity", () => {
    const max = 12.5;
    let previous = -1;
    for (const intensity of [0, 0.5, 3, 7, 12.5]) {
      const alpha = shadeAlpha(intensity, max);
      expect(alpha).toBeGreaterThan(previous);
      previous = alpha;
    }
    expect(shadeAlpha(12.5, max)).toBe(1);
  });

  it("cell click lists contributing threats", () => {
    const grid = emptyGrid({ intensity: 0, threat_ids: [] as string[] });
    grid[0][0] = { intensity: 5.0, threat_ids: ["card-a", "card-b"] };
    const target = container();
    renderMatrix(target, { grid });
    target.querySelector<HTMLElement>(".matrix-cell")!.click();
    const listed = [...target.querySelectorAll<HTMLElement>(".cell-threat-id")].map((n) => n.textContent);
    expect(listed).toEqual(["card-a", "card-b"]);
  });

  it("API failure shows an error banner and a stale badge over old data", async () => {
    const good = mockFetch({ "GET /api/projections/matrix": { body: { grid: emptyGrid({ intensity: 0, threat_ids: [] }) } } });
    const bad = mockFetch({ "GET /api/projections/matrix": { status: 500, body: { detail: "boom" } } });
    const target = container();
    await matrixView(target, new ApiClient("http://mock", good));
    expect(target.querySelector(".matrix")).not.toBeNull();
    await matrixView(target, new ApiClient("http://mock", bad));
    expect(target.querySelector(".error-banner")).not.toBeNull();
    expect(target.querySelector(".stale-badge")).not.toBeNull();
    expect(target.querySelector(".matrix")).not.toBeNull(); // old data kept
  });
});

describe("landscape fallback", () => {
  it("bar heights are proportional (10 vs 5 gives a 2:1 ratio)", () => {
    const grid = emptyGrid({ height: 0, surface_color: "blue" }) as LandscapeProjection["grid"];
    grid[0][0] = { height: 10, surface_color: "blue" };
    grid[0][1] = { height: 5, surface_color: "blue" };
    const target = container();
    renderLandscapeFallback(target, { grid });
    const bars = [...target.querySelectorAll<HTMLElement>(".landscape-bar")];
    expect(bars).toHaveLength(2);
    const px = bars.map((b) => Number.parseFloat(b.style.height));
    expect(px[0] / px[1]).toBeCloseTo(2.0, 9);
  });

  it("transport row renders amber bars and empty cells render no bar", () => {
    const grid = emptyGrid({ height: 0, surface_color: "blue" }) as LandscapeProjection["grid"];
    grid[3][2] = { height: 4, surface_color: "amber" };
    const target = container();
    renderLandscapeFallback(target, { grid });
    const bars = [...target.querySelectorAll<HTMLElement>(".landscape-bar")];
    expect(bars).toHaveLength(1);
    expect(bars[0].dataset.surfaceColor).toBe("amber");
  });

  it("headless environment has no webgl and uses the fallback", () => {
    expect(webglAvailable()).toBe(false);
  });
});

describe("stride chart", () => {
  it("renders all six categories with counts", () => {
    const target = container();
    renderStride(target, {
      counts: {
        Spoofing: 0,
        Tampering: 2,
        Repudiation: 0,
        InformationDisclosure: 3,
        DenialOfService: 0,
        ElevationOfPrivilege: 0,
      },
      total: 5,
    });
    expect(target.querySelectorAll(".stride-row")).toHaveLength(6);
    expect(target.querySelector(".stride-total")?.textContent).toBe("total: 5");
  });
});

describe("graph view", () => {
  const nodes: GraphNode[] = [
    { id: "tool:a", kind: "Tool", canonical_label: "a", aliases: [], concept: null },
    { id: "tool:b", kind: "Tool", canonical_label: "b", aliases: [], concept: null },
    { id: "tool:c", kind: "Tool", canonical_label: "c", aliases: [], concept: null },
    { id: "threat:x", kind: "ThreatEntity", canonical_label: "x", aliases: [], concept: null },
  ];
  const edges: GraphEdge[] = [
    { kind: "CHAINS_INTO", src: "tool:a", dst: "tool:b" },
    { kind: "CHAINS_INTO", src: "tool:b", dst: "tool:c" },
    { kind: "INSTANCES_OF", src: "threat:x", dst: "tool:a" },
  ];

  it("draws nodes colored by kind and edges", () => {
    const target = container();
    renderGraph(target, nodes, edges, new ApiClient("http://mock", mockFetch({})));
    const circles = [...target.querySelectorAll<SVGCircleElement>("circle")];
    expect(circles).toHaveLength(4);
    expect(target.querySelectorAll("line")).toHaveLength(3);
    const toolFill = circles.find((c) => c.dataset.kind === "Tool")?.getAttribute("fill");
    const threatFill = circles.find((c) => c.dataset.kind === "ThreatEntity")?.getAttribute("fill");
    expect(toolFill).not.toBe(threatFill);
  });

  it("clicking a chain head highlights the downstream closure", async () => {
    const fetchImpl = mockFetch({
      "GET /api/graph/reachable": { body: { entry: "tool:a", reachable: ["tool:b", "tool:c"] } },
    });
    const api = new ApiClient("http://mock", fetchImpl);
    const target = container();
    renderGraph(target, nodes, edges, api);
    await highlightReachable(target, api, "tool:a");
    const highlighted = [...target.querySelectorAll<SVGCircleElement>("circle.highlighted")].map(
      (c) => c.dataset.nodeId,
    );
    expect(highlighted.sort()).toEqual(["tool:b", "tool:c"]);
  });

  it("empty graph shows an empty state", () => {
    const target = container();
    renderGraph(target, [], [], new ApiClient("http://mock", mockFetch({})));
    expect(target.querySelector(".empty-state")).not.toBeNull();
  });

  it("oversized graphs switch to neighborhood mode", () => {
    const many: GraphNode[] = Array.from({ length: MAX_DRAWN_ELEMENTS + 10 }, (_, i) => ({
      id: `tool:${i}`,
      kind: "Tool",
      canonical_label: `tool ${i}`,
      aliases: [],
      concept: null,
    }));
    const few: GraphEdge[] = [{ kind: "CHAINS_INTO", src: "tool:0", dst: "tool:1" }];
    const target = container();
    renderGraph(target, many, few, new ApiClient("http://mock", mockFetch({})));
    expect(target.querySelector(".neighborhood-note")).not.toBeNull();
    expect(target.querySelectorAll("circle").length).toBeLessThan(300);
  });

  it("force layout keeps connected nodes closer than strangers", () => {
    const positions = forceLayout(["a", "b", "z"], [{ src: "a", dst: "b" }]);
    const by = new Map(positions.map((p) => [p.id, p]));
    const ab = Math.hypot(by.get("a")!.x - by.get("b")!.x, by.get("a")!.y - by.get("b")!.y);
    const az = Math.hypot(by.get("a")!.x - by.get("z")!.x, by.get("a")!.y - by.get("z")!.y);
    expect(ab).toBeLessThan(az);
  });
});

describe("run control", () => {
  it("displays counts and per-source errors after a run", async () => {
    const record = {
      run_id: "run-1",
      kind: "Gather",
      started: "t0",
      finished: "t1",
      status: "PartialFailure",
      counts: { items_collected: 3 },
      errors: ["rss https://down.example/rss: unreachable"],
    };
    const api = new ApiClient("http://mock", mockFetch({ "POST /api/runs": { body: record } }));
    const target = container();
    const result = await triggerAndWatch(target, api, "Gather", 1);
    expect(result?.status).toBe("PartialFailure");
    expect(target.querySelector(".run-count")?.textContent).toBe("items_collected: 3");
    expect(target.querySelector(".run-error")?.textContent).toContain("down.example");
  });

  it("concurrent-run rejection surfaces as a notice", async () => {
    const api = new ApiClient(
      "http://mock",
      mockFetch({ "POST /api/runs": { status: 409, body: { detail: "a Gather run is already in progress" } } }),
    );
    const target = container();
    const result = await triggerAndWatch(target, api, "Gather", 1);
    expect(result).toBeNull();
    expect(target.querySelector(".run-notice")?.textContent).toContain("already in progress");
    expect(target.querySelector(".error-banner")).toBeNull();
  });

  it("backend being down shows an error banner", async () => {
    const api = new ApiClient("http://mock", async () => {
      throw new Error("connection refused");
    });
    const target = container();
    const result = await triggerAndWatch(target, api, "Gather", 1);
    expect(result).toBeNull();
    expect(target.querySelector(".error-banner")).not.toBeNull();
  });
});

/** Typed client for the platform REST API. The dashboard never computes
 * truth values itself; everything displayed comes through here. */

import type {
  GraphEdge,
  GraphNode,
  IntelItem,
  LandscapeProjection,
  MatrixProjection,
  RiskPlan,
  RunRecord,
  ScoringConfig,
  StrideDistribution,
  ThreatCard,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`API ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const parsed = (await response.json()) as { detail?: string };
        if (parsed.detail) detail = parsed.detail;
      } catch {
        // keep statusText
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  /** Raw body text, for byte-level comparisons in tests. */
  async raw(path: string): Promise<string> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return await response.text();
  }

  listIntel(minRelevance?: number): Promise<IntelItem[]> {
    const query = minRelevance === undefined ? "" : `?min_relevance=${minRelevance}`;
    return this.request("GET", `/api/intel${query}`);
  }

  listThreats(filters: { level?: string; stride?: string } = {}): Promise<ThreatCard[]> {
    const params = new URLSearchParams();
    if (filters.level) params.set("level", filters.level);
    if (filters.stride) params.set("stride", filters.stride);
    const query = params.toString();
    return this.request("GET", `/api/threats${query ? "?" + query : ""}`);
  }

  getThreat(id: string): Promise<ThreatCard> {
    return this.request("GET", `/api/threats/${id}`);
  }

  matrix(): Promise<MatrixProjection> {
    return this.request("GET", "/api/projections/matrix");
  }

  landscape(): Promise<LandscapeProjection> {
    return this.request("GET", "/api/projections/landscape");
  }

  stride(): Promise<StrideDistribution> {
    return this.request("GET", "/api/projections/stride");
  }

  graphNodes(): Promise<{ nodes: GraphNode[] }> {
    return this.request("GET", "/api/graph/nodes");
  }

  graphEdges(): Promise<{ edges: GraphEdge[] }> {
    return this.request("GET", "/api/graph/edges");
  }

  reachable(entry: string): Promise<{ entry: string; reachable: string[] }> {
    return this.request("GET", `/api/graph/reachable?entry=${encodeURIComponent(entry)}`);
  }

  triggerRun(kind: string): Promise<RunRecord> {
    return this.request("POST", "/api/runs", { kind });
  }

  getRun(runId: string): Promise<RunRecord> {
    return this.request("GET", `/api/runs/${runId}`);
  }

  listRuns(): Promise<RunRecord[]> {
    return this.request("GET", "/api/runs");
  }

  listPlans(): Promise<RiskPlan[]> {
    return this.request("GET", "/api/plans");
  }

  createPlan(cardIds: string[]): Promise<RiskPlan> {
    return this.request("POST", "/api/plans", { card_ids: cardIds });
  }

  getScoringConfig(): Promise<ScoringConfig> {
    return this.request("GET", "/api/config/scoring");
  }

  putScoringConfig(config: ScoringConfig): Promise<ScoringConfig> {
    return this.request("PUT", "/api/config/scoring", config);
  }
}

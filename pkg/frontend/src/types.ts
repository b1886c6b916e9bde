/** Response shapes of the platform REST API. */

export type RiskLevel = "Critical" | "High" | "Medium" | "Low";

export const STRIDE_CATEGORIES = [
  "Spoofing",
  "Tampering",
  "Repudiation",
  "InformationDisclosure",
  "DenialOfService",
  "ElevationOfPrivilege",
] as const;
export type StrideCategory = (typeof STRIDE_CATEGORIES)[number];

export const SOURCE_TYPES = ["WebSearch", "Rss", "Nvd", "GithubAdvisory"] as const;
export type SourceType = (typeof SOURCE_TYPES)[number];

export const RISK_LEVELS: RiskLevel[] = ["Critical", "High", "Medium", "Low"];

export interface IntelItem {
  id: string;
  title: string;
  content: string;
  source_url: string;
  source_type: SourceType;
  collected_at: string;
  relevance: number | null;
}

export interface ScoredRisk {
  base: number;
  multiplier: number;
  final: number;
  level: RiskLevel;
}

export interface RiskFactors {
  L: number;
  S: number;
  I: number;
  D: number;
}

export interface ThreatCard {
  id: string;
  title: string;
  summary: string;
  mcp_ids: string[];
  workflow_phase: string;
  stride: StrideCategory;
  factors: RiskFactors;
  scored: ScoredRisk;
  owasp_llm: string[];
  owasp_agentic: string[];
  upd_chain: { steps: [string, string][]; edges: string[] } | null;
  source_item_ids: string[];
  cve_ids: string[];
  rce_or_exfil_or_critical_asset: boolean;
  audit_notes: string[];
  degraded: boolean;
}

export interface MatrixCell {
  intensity: number;
  threat_ids: string[];
}

export interface MatrixProjection {
  grid: MatrixCell[][];
}

export interface LandscapeCell {
  height: number;
  surface_color: "blue" | "green" | "red" | "amber";
}

export interface LandscapeProjection {
  grid: LandscapeCell[][];
}

export interface StrideDistribution {
  counts: Record<string, number>;
  total: number;
}

export interface GraphNode {
  id: string;
  kind: string;
  canonical_label: string;
  aliases: string[];
  concept: string | null;
}

export interface GraphEdge {
  kind: string;
  src: string;
  dst: string;
}

export interface RunRecord {
  run_id: string;
  kind: string;
  started: string;
  finished: string | null;
  status: "Running" | "Succeeded" | "PartialFailure" | "Failed";
  counts: Record<string, number | string>;
  errors: string[];
}

export interface Mitigation {
  text: string;
  priority: "P0" | "P1" | "P2";
  effort: "Low" | "Medium" | "High";
}

export interface PlanEntry {
  threat_card_id: string;
  final_score: number;
  detection_methods: string[];
  mitigations: Mitigation[];
  framework_refs: string[];
  unavailable: boolean;
}

export interface RiskPlan {
  id: string;
  entries: PlanEntry[];
  degraded: boolean;
  created_at: string;
}

export interface ScoringConfig {
  w_L: number;
  w_S: number;
  w_I: number;
  w_D: number;
  multiplier_semantic: number;
  multiplier_chaining: number;
  multiplier_observability: number;
  threshold_critical: number;
  threshold_high: number;
  threshold_medium: number;
}

/** Wire types mirroring the review service's JSON payloads. */

export type Label = "A" | "N" | "C";

export interface QueueItem {
  clip_id: string;
  severity: number;
  reasons: string[];
  rule_label: Label;
  external_label: Label | null;
  fused_label: Label | null;
  final_label: Label;
}

export interface QueuePage {
  total: number;
  offset: number;
  limit: number;
  items: QueueItem[];
}

export interface LabelRecord {
  clip_id: string;
  rule_label: Label;
  external_label: Label | null;
  fused_label: Label | null;
  human_label: Label | null;
  final_label: Label;
  provenance: string;
  needs_review: boolean;
  reviewer: string | null;
  at: string | null;
  prior_final_label: Label | null;
  fired_rules?: string[];
}

export interface AgentDisplay {
  agent_id: string;
  kind: string;
  half_length: number;
  half_width: number;
  path: [number, number][];
}

export interface FeatureDisplay {
  v_avg: number;
  v_std: number;
  a_max: number;
  sigma_a: number;
  ay_max: number;
  delta_psi: number;
  trend: string;
  unsafe_ratio: number;
  safe_ratio: number;
  min_ttc: number | null;
}

export interface ClipDisplay {
  scenario: string;
  duration_s: number;
  n_samples: number;
  path: [number, number][];
  speeds: number[];
  agents: AgentDisplay[];
  corridor: [number, number][] | null;
  features: FeatureDisplay | null;
  context: Record<string, unknown>;
}

export interface ClipDetail {
  clip_id: string;
  record: LabelRecord;
  display: ClipDisplay | null;
}

export interface Stats {
  total: number;
  pending: number;
  verdicted: number;
  final_labels: Record<Label, number>;
  agreement: { count: number; matches: number; rate: number | null };
}

export interface VerdictResponse {
  clip_id: string;
  record: LabelRecord;
}

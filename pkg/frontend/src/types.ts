export interface TaskStats {
  left_size: number;
  right_size: number;
  candidate_count: number;
  matches_found: number | null;
  estimated_precision: number | null;
  precision_label_count: number;
  blocking_recall: number | null;
  no_usable_lfs: boolean;
}

export interface LfStatsEntry {
  name: string;
  origin: string;
  n_match: number;
  n_unmatch: number;
  n_abstain: number;
  coverage: number;
  est_fpr: number;
  est_fnr: number;
}

export interface PairRow {
  left_id: string;
  right_id: string;
  schema: string[];
  left: string[];
  right: string[];
  ground_truth: 'match' | 'non-match' | null;
  likelihood?: number;
  match_prob?: number;
  vote?: number;
}

export interface LfEntry {
  name: string;
  origin: string;
  version: string;
  text: string;
}

export interface ApplyResult {
  stats: TaskStats;
  lf_stats: LfStatsEntry[];
  lf_evaluations: number;
  iterations: number;
}

export interface TraceResult {
  lf: string;
  pair: [string, string];
  left_text: string;
  right_text: string;
  similarity?: number;
  left_capture?: string | null;
  right_capture?: string | null;
  vote: number;
}

export type LabelValue = 'match' | 'non-match' | 'clear';
export type SampleKind = 'smart' | 'precision';
export type DrillKind = 'fp' | 'fn';

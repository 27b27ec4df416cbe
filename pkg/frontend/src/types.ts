// Wire types mirroring the conduct service JSON contract.

export interface Dose {
  j: number;
  k: number;
}

export interface Decision {
  action: "assign" | "terminate";
  dose: Dose | null;
  reason: string;
}

export interface CohortEntry {
  dose: Dose;
  patients: number;
  dlts: number;
}

export interface StudySettings {
  phi: number;
  max_n: number;
  cohort_size: number;
  early_stop_n: number | null;
}

export interface TrialView {
  trial_id: string;
  name: string | null;
  design: string;
  params: Record<string, unknown>;
  grid: { J: number; K: number };
  study: StudySettings;
  seed: number;
  revision: number;
  phase: string;
  patients: number;
  dlts: number;
  n: number[][]; // K rows of J counts (row k = agent-B level k)
  y: number[][];
  log: CohortEntry[];
  estimates: number[][] | null;
  recommendation: Decision;
  terminated: boolean;
}

export interface PostCohortBody {
  dose: Dose;
  patients: number;
  dlts: number;
  idempotency_key?: string;
  expected_revision?: number;
  override?: boolean;
  note?: string;
}

export interface PostCohortResponse {
  trial_id: string;
  revision: number;
  decision: Decision;
  estimates: number[][] | null;
  phase: string;
  applied: boolean;
}

export interface DesignInfo {
  id: string;
  description: string;
  cohort_unit: string;
  params_schema: Record<string, unknown>;
}

/** Response body shapes of the fairlicit HTTP service, mirrored verbatim. */

export type Prediction = "high" | "low";
export type Verdict = "satisfied" | "violated";
export type Metric = "positive_rate" | "fpr" | "fnr" | "accuracy";
export type Criterion = "unawareness" | "statistical_parity" | "equalized_odds";
export type Role = "social_worker" | "parent" | "other";

export interface FeatureDef {
  name: string;
  kind: "ordinal" | "categorical";
  values: string[];
  levels?: number[];
  description: string;
}

export interface SchemaBody {
  features: FeatureDef[];
  sensitive_attributes: string[];
}

export interface CaseBody {
  id: string;
  values: Record<string, string>;
  prediction: Prediction | null;
  score: number | null;
  true_label: Prediction | null;
}

export interface DatasetBody {
  schema: SchemaBody;
  cases: CaseBody[];
  threshold: number;
  provenance: string;
}

export interface DatasetListEntry {
  id: string;
  n_cases: number;
  provenance: string;
  threshold: number;
}

export interface SubgroupStats {
  value: string;
  n: number;
  n_predicted_high: number;
  n_true_high: number | null;
  n_true_low: number | null;
  positive_rate: number | null;
  fpr: number | null;
  fnr: number | null;
  accuracy: number | null;
}

export interface FairnessBody {
  attribute: string;
  criterion: string;
  epsilon: number;
  max_gap: number;
  subgroups: SubgroupStats[];
  verdict: Verdict;
}

export interface GroupViewRow {
  subgroup: string[];
  n: number;
  value: number | null;
}

export interface GroupViewBody {
  attributes: string[];
  metric: string;
  rows: GroupViewRow[];
  description: string;
}

export interface MetricsBody {
  view: GroupViewBody;
  fairness: FairnessBody | null;
}

export interface RankedEntry {
  id: string;
  /** Exact decimal rendering of the distance, as formatted by the server. */
  distance: string;
  prediction: Prediction;
}

export interface SimilarityBody {
  reference: string;
  weights: number[];
  entries: RankedEntry[];
}

export interface QuestionCase {
  id: string;
  prediction: Prediction | null;
  values: Record<string, string>;
}

export interface PairwiseQuestionBody {
  type: "pairwise";
  id: string;
  case_a: QuestionCase;
  case_b: QuestionCase;
  choices: string[];
  pair_index: number | null;
  show_predictions: boolean;
  source: "fixture" | "random";
}

export interface GroupFairnessQuestionBody {
  type: "group_fairness";
  id: string;
  criterion: Criterion;
  attribute: string;
  text: string;
  choices: string[];
}

export interface StagePromptBody {
  type: "stage_prompt";
  stage: number;
  action: string;
  message: string;
}

export type NextBody = PairwiseQuestionBody | GroupFairnessQuestionBody | StagePromptBody;

export interface CreateSessionBody {
  id: string;
  stage: number;
}

export interface RespondBody {
  recorded: string;
  stage: number;
}

export interface EventAck {
  recorded: string;
  stage: number;
}

export interface AdvanceBody {
  stage: number;
  closed: boolean;
}

export interface TranscriptEvent {
  kind: string;
  stage: number;
  timestamp: number;
  payload: Record<string, unknown>;
}

export interface SessionExport {
  format: string;
  version: number;
  session: {
    session_id: string;
    dataset_ref: string;
    seed: number;
    stage: number;
    created_at: number;
    closed_at: number | null;
    participant: { role: string; demographics: Record<string, string> };
    fixture_cases: unknown[];
    stage1_queue: { id: string }[];
    transcript: TranscriptEvent[];
  };
}

export interface ErrorBody {
  error: string;
  detail: string;
}

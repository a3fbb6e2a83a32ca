// Wire types shared with the scoring service.

export type ContextKind =
  | "quantities_within_component"
  | "components_within_quantity";

export interface ContextJson {
  kind: ContextKind;
  component?: string;
  quantity?: string;
}

export interface JudgmentJson {
  row: number;
  col: number;
  value: number;
}

export interface MatrixJson {
  context: ContextJson;
  items: string[];
  judgments: JudgmentJson[];
}

export interface QuestionnairePayload {
  expert_id: string;
  matrices: MatrixJson[];
}

export interface TaxonomyResponse {
  quantities: string[];
  components: string[];
  tags: Record<string, string>;
  applicability: Record<string, string[]>;
  pair_count: number;
}

export interface EvaluateResponse {
  items: string[];
  weights: number[];
  lambda_max: number;
  ci: number;
  cr: number;
  acceptable: boolean;
}

export interface QuestionnaireAccepted {
  id: string;
  expert_id: string;
  contexts: number;
}

/** One comparison context the expert must fill in, with its fixed item list. */
export interface ContextSpec {
  key: string;
  kind: ContextKind;
  subject: string;
  items: string[];
}

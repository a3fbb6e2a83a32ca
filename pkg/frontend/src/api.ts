import type {
  EvaluateResponse,
  QuestionnaireAccepted,
  QuestionnairePayload,
  TaxonomyResponse,
} from "./types";

/** Server-side rejection with the field diagnostics the service returns. */
export class ApiError extends Error {
  readonly status: number;
  readonly fields: Record<string, string>;

  constructor(status: number, message: string, fields: Record<string, string> = {}) {
    super(message);
    this.status = status;
    this.fields = fields;
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(
      response.status,
      typeof body?.error === "string" ? body.error : `HTTP ${response.status}`,
      body?.fields ?? {},
    );
  }
  return body as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "http://127.0.0.1:8321") {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async taxonomy(): Promise<TaxonomyResponse> {
    return asJson(await fetch(this.url("/api/taxonomy")));
  }

  /** The single source of truth for weights and consistency ratios. */
  async evaluateMatrix(
    items: string[],
    judgments: Array<{ row: number; col: number; value: number }>,
  ): Promise<EvaluateResponse> {
    return asJson(
      await fetch(this.url("/api/matrix/evaluate"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ items, judgments }),
      }),
    );
  }

  async submitQuestionnaire(payload: QuestionnairePayload): Promise<QuestionnaireAccepted> {
    return asJson(
      await fetch(this.url("/api/questionnaires"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      }),
    );
  }
}

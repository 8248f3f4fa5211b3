import type {
  AdvanceBody,
  CreateSessionBody,
  DatasetBody,
  DatasetListEntry,
  ErrorBody,
  EventAck,
  FairnessBody,
  MetricsBody,
  NextBody,
  RespondBody,
  Role,
  SessionExport,
  SimilarityBody,
} from "./types.js";

/** Error raised for any non-2xx response, carrying the service error code. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, body: ErrorBody) {
    super(`${body.error}: ${body.detail}`);
    this.name = "ApiError";
    this.code = body.error;
    this.status = status;
  }
}

export interface MetricsQuery {
  attribute: string;
  attribute2?: string;
  metric: string;
  epsilon: number;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin typed client for the fairlicit HTTP service.  All displayed numbers
 * come from these bodies; the UI never recomputes a rate, distance, or
 * verdict.  Query values are identifiers or numbers, so URLs are assembled
 * literally (commas in weight lists stay unencoded).
 */
export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, "");
    const fallback = fetch.bind(globalThis) as FetchLike;
    this.fetchFn = fetchFn ?? fallback;
  }

  private async request<T>(method: string, url: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const response = await this.fetchFn(this.base + url, init);
    const parsed: unknown = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, parsed as ErrorBody);
    }
    return parsed as T;
  }

  async listDatasets(): Promise<DatasetListEntry[]> {
    const body = await this.request<{ datasets: DatasetListEntry[] }>("GET", "/datasets");
    return body.datasets;
  }

  getDataset(id: string): Promise<DatasetBody> {
    return this.request("GET", `/datasets/${id}`);
  }

  fairness(id: string, criterion: string, attribute: string, epsilon: number): Promise<FairnessBody> {
    return this.request(
      "GET",
      `/datasets/${id}/fairness?criterion=${criterion}&attribute=${attribute}&epsilon=${epsilon}`,
    );
  }

  metrics(id: string, query: MetricsQuery): Promise<MetricsBody> {
    const parts = [`attribute=${query.attribute}`];
    if (query.attribute2 !== undefined) {
      parts.push(`attribute2=${query.attribute2}`);
    }
    parts.push(`metric=${query.metric}`, `epsilon=${query.epsilon}`);
    return this.request("GET", `/datasets/${id}/metrics?${parts.join("&")}`);
  }

  similarity(id: string, reference: string, weights: number[]): Promise<SimilarityBody> {
    const joined = weights.map(String).join(",");
    return this.request("GET", `/datasets/${id}/similarity?reference=${reference}&weights=${joined}`);
  }

  createSession(options: {
    sessionId?: string;
    dataset: string;
    seed: number;
    role: Role;
    demographics?: Record<string, string>;
  }): Promise<CreateSessionBody> {
    const body: Record<string, unknown> = {
      dataset: options.dataset,
      seed: options.seed,
      participant: { role: options.role, demographics: options.demographics ?? {} },
    };
    if (options.sessionId !== undefined) {
      body.session_id = options.sessionId;
    }
    return this.request("POST", "/sessions", body);
  }

  nextQuestion(sessionId: string): Promise<NextBody> {
    return this.request("GET", `/sessions/${sessionId}/next`);
  }

  respond(sessionId: string, questionId: string, choice: string, rationale?: string): Promise<RespondBody> {
    const body: Record<string, unknown> = { question_id: questionId, choice };
    if (rationale !== undefined && rationale !== "") {
      body.rationale = rationale;
    }
    return this.request("POST", `/sessions/${sessionId}/responses`, body);
  }

  recordEvent(sessionId: string, payload: Record<string, unknown>): Promise<EventAck> {
    return this.request("POST", `/sessions/${sessionId}/events`, payload);
  }

  advance(sessionId: string): Promise<AdvanceBody> {
    return this.request("POST", `/sessions/${sessionId}/advance`, {});
  }

  exportSession(sessionId: string): Promise<SessionExport> {
    return this.request("GET", `/sessions/${sessionId}/export`);
  }
}

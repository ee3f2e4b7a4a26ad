// Typed client for the /api/v1 session protocol.

export interface OutcomeJson {
  money?: number;
  label?: string;
}

export interface BranchJson {
  event: number[];
  outcome: OutcomeJson;
}

export interface GambleJson {
  branches: BranchJson[];
}

export interface QueryPayload {
  query_id: number;
  left: GambleJson;
  right: GambleJson;
  human_text: string;
}

export type NextResponse = QueryPayload | { done: true };

export type Answer = "left" | "right" | "indifferent";

export interface SampleJson {
  k: number;
  n: number;
  prob: string;
  prob_float: number;
  weight: number;
  query_ids: number[];
}

export interface RiskCurveJson {
  knots: [number, number][];
  rule: string;
}

export interface EstimateJson {
  value: number;
  bracket: [string, string];
  bracket_float: [number, number];
  method: string;
  query_count: number;
  converged: boolean;
}

export interface ResultsJson {
  samples?: SampleJson[];
  risk_curve?: RiskCurveJson;
  estimates?: EstimateJson[];
  query_count: number;
}

export interface AnswerResponse {
  state: "awaiting" | "done";
  query?: QueryPayload | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class SessionApi {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, {
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
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async createSession(procedure: string, config: unknown): Promise<string> {
    const body = await this.request<{ id: string }>("POST", "/sessions", {
      procedure,
      config,
    });
    return body.id;
  }

  next(sessionId: string): Promise<NextResponse> {
    return this.request("GET", `/sessions/${sessionId}/next`);
  }

  answer(sessionId: string, queryId: number, answer: Answer): Promise<AnswerResponse> {
    return this.request("POST", `/sessions/${sessionId}/answer`, {
      query_id: queryId,
      answer,
    });
  }

  results(sessionId: string): Promise<ResultsJson> {
    return this.request("GET", `/sessions/${sessionId}/results`);
  }

  transcriptUrl(sessionId: string): string {
    return `${this.baseUrl}/api/v1/sessions/${sessionId}/transcript`;
  }
}

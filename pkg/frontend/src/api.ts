import type {
  JudgmentRecord,
  MetricReport,
  Sector,
  SimilarRequest,
  SimilarResponse,
  SummarizeRequest,
  SummarizeResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function toError(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(code, message, response.status);
}

/** Typed client for the /v1 service; the fetch implementation is injectable
 * so tests can replay captured responses. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) throw await toError(response);
    return response.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await toError(response);
    return response.json() as Promise<T>;
  }

  getSectors(): Promise<Sector[]> {
    return this.get("/v1/sectors");
  }

  getJudgment(id: string): Promise<JudgmentRecord> {
    return this.get(`/v1/judgments/${encodeURIComponent(id)}`);
  }

  summarize(request: SummarizeRequest): Promise<SummarizeResponse> {
    return this.post("/v1/summarize", request);
  }

  similar(request: SimilarRequest): Promise<SimilarResponse> {
    return this.post("/v1/similar", request);
  }

  evaluate(pairs: unknown[], kinds?: string[]): Promise<MetricReport> {
    return this.post("/v1/evaluate", kinds ? { pairs, kinds } : { pairs });
  }
}

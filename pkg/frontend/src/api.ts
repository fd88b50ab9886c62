// Typed client for the session service. Native fetch; no runtime deps.

export interface Question {
  ident: string;
  prompt: string;
}

export interface AnswerOutcome {
  status: "in_progress" | "diagnosed" | "no_match";
  questionsAsked: number;
}

export interface Diagnosis {
  rule: string;
  diagnosis: string;
  tests: string | null;
  treatments: string | null;
}

export interface SessionResult {
  status: string;
  transcript: Array<{ ident: string; answer: string }>;
  diagnoses: Diagnosis[];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx response from the service; carries the server's error body. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, detail?: string) {
    super(detail ?? code);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let code = "http_error";
  let detail: string | undefined;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") code = body.error;
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the generic code
  }
  return new ApiError(response.status, code, detail);
}

export class NmxClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // Late-bound default so tests that stub globalThis.fetch still win.
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  async createSession(): Promise<string> {
    const response = await this.fetchImpl(`${this.base}/api/sessions`, {
      method: "POST",
    });
    if (!response.ok) throw await errorFrom(response);
    const body = await response.json();
    return body.session_id as string;
  }

  /** Resolves to null once the dialog has reached a terminal state. */
  async nextQuestion(sessionId: string): Promise<Question | null> {
    const response = await this.fetchImpl(
      `${this.base}/api/sessions/${sessionId}/next`,
    );
    if (!response.ok) throw await errorFrom(response);
    const body = await response.json();
    if (body.kind !== "question") return null;
    return { ident: body.ident, prompt: body.prompt };
  }

  async postAnswer(
    sessionId: string,
    ident: string,
    answer: "yes" | "no",
  ): Promise<AnswerOutcome> {
    const response = await this.fetchImpl(
      `${this.base}/api/sessions/${sessionId}/answers`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ ident, answer }),
      },
    );
    if (!response.ok) throw await errorFrom(response);
    const body = await response.json();
    return { status: body.status, questionsAsked: body.questions_asked };
  }

  async fetchResult(sessionId: string): Promise<SessionResult> {
    const response = await this.fetchImpl(
      `${this.base}/api/sessions/${sessionId}/result`,
    );
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as SessionResult;
  }
}

import type {
  AcceptRequest,
  AcceptResponse,
  CompleteRequest,
  CompletionPhase,
  ExecuteRequest,
  ExecuteResponse,
  RegisterRequest,
  RegisterResponse,
  Suggestion,
} from "./types.js";

export interface ApiClient {
  registerEndpoint(req: RegisterRequest): Promise<RegisterResponse>;
  /** Streams completion phases: tree matches first, bin matches second. */
  complete(
    req: CompleteRequest,
    onPhase: (phase: CompletionPhase) => void,
    signal?: AbortSignal,
  ): Promise<void>;
  execute(req: ExecuteRequest): Promise<ExecuteResponse>;
  accept(req: AcceptRequest): Promise<AcceptResponse>;
}

export class HttpApiClient implements ApiClient {
  constructor(private base: string = "") {}

  private async post<T>(route: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + route, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      const detail = await response.text();
      throw new Error(`${route} failed (${response.status}): ${detail}`);
    }
    return response.json() as Promise<T>;
  }

  registerEndpoint(req: RegisterRequest): Promise<RegisterResponse> {
    return this.post("/endpoints", req);
  }

  async complete(
    req: CompleteRequest,
    onPhase: (phase: CompletionPhase) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await fetch(this.base + "/complete", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ...req, stream: true }),
      signal,
    });
    if (!response.ok || response.body === null) {
      throw new Error(`/complete failed (${response.status})`);
    }
    for await (const line of ndjsonLines(response.body, signal)) {
      onPhase(JSON.parse(line) as CompletionPhase);
    }
  }

  execute(req: ExecuteRequest): Promise<ExecuteResponse> {
    return this.post("/execute", req);
  }

  accept(req: AcceptRequest): Promise<AcceptResponse> {
    return this.post("/accept", req);
  }
}

export async function* ndjsonLines(
  body: ReadableStream<Uint8Array>,
  signal?: AbortSignal,
): AsyncGenerator<string> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffered = "";
  try {
    while (true) {
      if (signal?.aborted) return;
      const { done, value } = await reader.read();
      if (value) buffered += decoder.decode(value, { stream: true });
      let newline;
      while ((newline = buffered.indexOf("\n")) >= 0) {
        const line = buffered.slice(0, newline).trim();
        buffered = buffered.slice(newline + 1);
        if (line) yield line;
      }
      if (done) {
        const rest = buffered.trim();
        if (rest) yield rest;
        return;
      }
    }
  } finally {
    reader.releaseLock();
  }
}

// --- fixture replay --------------------------------------------------------

export interface ReplayFixture {
  endpoints: Record<string, RegisterResponse>;
  completions: Record<string, { tree: Suggestion[]; bins: Suggestion[] }>;
  executions: Record<string, ExecuteResponse>;
  accepts: Record<string, AcceptResponse>;
}

export function normalizeQuery(text: string): string {
  return text.replace(/\s+/g, " ").trim();
}

/**
 * Serves recorded service responses, delivering completion phases in two
 * separate turns of the event loop just like the chunked HTTP transport.
 * Call counters let tests assert that accepting a suggestion causes no
 * /execute traffic.
 */
export class ReplayApiClient implements ApiClient {
  calls = { register: 0, complete: 0, execute: 0, accept: 0 };

  constructor(private fixture: ReplayFixture) {}

  async registerEndpoint(req: RegisterRequest): Promise<RegisterResponse> {
    this.calls.register += 1;
    const key = req.id ?? req.fixture ?? req.url ?? "";
    const recorded = this.fixture.endpoints[key];
    if (!recorded) throw new Error(`no recorded endpoint ${key}`);
    return recorded;
  }

  async complete(
    req: CompleteRequest,
    onPhase: (phase: CompletionPhase) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    this.calls.complete += 1;
    const key = `${req.endpointId}|${req.slot}|${req.text}`;
    const recorded = this.fixture.completions[key] ?? { tree: [], bins: [] };
    await Promise.resolve();
    if (signal?.aborted) return;
    onPhase({ phase: "tree", suggestions: recorded.tree });
    await Promise.resolve();
    if (signal?.aborted) return;
    onPhase({ phase: "bins", suggestions: recorded.bins });
  }

  async execute(req: ExecuteRequest): Promise<ExecuteResponse> {
    this.calls.execute += 1;
    const key = `${req.endpointId}|${normalizeQuery(req.query)}`;
    const recorded = this.fixture.executions[key];
    if (!recorded) throw new Error(`no recorded execution ${key}`);
    return { ...recorded, sessionId: req.sessionId ?? recorded.sessionId };
  }

  async accept(req: AcceptRequest): Promise<AcceptResponse> {
    this.calls.accept += 1;
    const recorded = this.fixture.accepts[String(req.suggestionIndex)];
    if (!recorded) throw new Error(`no recorded accept ${req.suggestionIndex}`);
    return recorded;
  }
}

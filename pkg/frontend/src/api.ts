/**
 * Typed client for the exercise service's /api/v1 routes.
 *
 * The fetch implementation is injectable so tests can intercept and record
 * every request/response pair; nothing here computes a verdict — grading
 * results are passed through exactly as the service returned them.
 */

import type {
  AttemptResultObj,
  ErrorBodyObj,
  InstanceObj,
  ReductionSpecObj,
  SessionStateObj,
  VerifierVerdictObj,
  WorkflowDefObj,
  WorkflowSummaryObj,
} from "./model.js";

export interface RequestInitLike {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}

export interface ResponseLike {
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: RequestInitLike) => Promise<ResponseLike>;

/** A non-2xx service reply, carrying the error body verbatim. */
export class ApiError extends Error {
  readonly status: number;
  readonly body: ErrorBodyObj;

  constructor(status: number, body: ErrorBodyObj) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.body = body;
  }

  get code(): string {
    return this.body.code;
  }
}

function defaultFetch(): FetchLike {
  const impl = globalThis.fetch;
  if (typeof impl !== "function") {
    throw new Error("no fetch implementation available; pass one explicitly");
  }
  return (url, init) => impl(url, init);
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  /** `baseUrl` should include the /api/v1 prefix. */
  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? defaultFetch();
  }

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const init: RequestInitLike = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const parsed = await response.json();
    if (response.status >= 400) {
      return Promise.reject(new ApiError(response.status, parsed as ErrorBodyObj));
    }
    return parsed;
  }

  async listWorkflows(): Promise<WorkflowSummaryObj[]> {
    return (await this.request("GET", "/workflows")) as WorkflowSummaryObj[];
  }

  async getWorkflow(id: string): Promise<WorkflowDefObj> {
    return (await this.request("GET", `/workflows/${encodeURIComponent(id)}`)) as WorkflowDefObj;
  }

  async createSession(workflowId: string): Promise<string> {
    const created = (await this.request("POST", "/sessions", { workflowId })) as {
      sessionId: string;
    };
    return created.sessionId;
  }

  async getSession(sessionId: string): Promise<SessionStateObj> {
    return (await this.request(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}`,
    )) as SessionStateObj;
  }

  async submitAttempt(
    sessionId: string,
    taskId: string,
    payload: unknown,
  ): Promise<AttemptResultObj> {
    const path =
      `/sessions/${encodeURIComponent(sessionId)}` +
      `/tasks/${encodeURIComponent(taskId)}/attempts`;
    return (await this.request("POST", path, { payload })) as AttemptResultObj;
  }

  async verifySpec(spec: ReductionSpecObj, bound?: number): Promise<VerifierVerdictObj> {
    const body: Record<string, unknown> = { spec };
    if (bound !== undefined) {
      body.bound = bound;
    }
    return (await this.request("POST", "/tools/verify", body)) as VerifierVerdictObj;
  }

  async applySpec(spec: ReductionSpecObj, instance: InstanceObj): Promise<InstanceObj> {
    return (await this.request("POST", "/tools/apply", { spec, instance })) as InstanceObj;
  }
}

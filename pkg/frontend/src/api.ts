/**
 * Client for the analysis service under /api/v1.
 *
 * The workbench never computes plans: everything in the report pane and
 * the canvas overlay is read verbatim from these response documents.
 */

import type { EdgeKind, GraphDocument } from "./format.js";

export const DEFAULT_SERVICE_URL = "http://127.0.0.1:8787";

export interface AnalysisRequestBody {
  attacker: string;
  target: string;
  target_asset: string | null;
  k?: number;
  max_cost?: number;
  max_steps?: number;
  trigger_depth?: number;
}

export interface Violation {
  code: string;
  subject: string;
  message: string;
}

export interface AssetCategory {
  id: string;
  name: string;
  udhr_articles: number[];
  severity_rank: number;
  example_scenario: string;
  example_attack: string;
}

export interface EdgeRef {
  edge: string;
  kind: EdgeKind;
  from: string;
  to: string;
}

export interface ChainStep {
  edge: string;
  from: string;
  to: string;
  action: EdgeKind;
}

export interface TriggerChainDoc {
  kind: "activation" | "consumption" | "automatic_watch" | "already_active";
  total_cost: number;
  steps: ChainStep[];
  compelled: ChainStep | null;
}

export interface StepCost {
  push_poison: number;
  activation_trigger: number;
  consumption_trigger: number;
  total: number;
}

export interface PlanStep {
  push: EdgeRef;
  activation: TriggerChainDoc | null;
  consumption: TriggerChainDoc | null;
  cost: StepCost;
  narrative: string;
}

export interface PlanAction {
  seq: number;
  edge: string;
  kind: EdgeKind;
  from: string;
  to: string;
  role: "push" | "activation" | "consumption";
  step_index: number;
  occurrence: number;
  cost: number;
}

export interface PlanDocument {
  rank: number;
  total_cost: number;
  attacker: string;
  target: string;
  target_asset: string | null;
  steps: PlanStep[];
  actions: PlanAction[];
}

export interface ReportDocument {
  schema: string;
  graph_digest: string;
  request: Required<AnalysisRequestBody>;
  plan_count: number;
  plans: PlanDocument[];
}

/** Error carrying the service's status code and any validation violations. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly violations: Violation[] = [],
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function decodeFailure(response: Response): Promise<ApiError> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // non-JSON error body; fall through to the generic message
  }
  if (typeof body === "object" && body !== null) {
    const record = body as Record<string, unknown>;
    if (Array.isArray(record.violations)) {
      const violations = record.violations as Violation[];
      const summary = violations.map((v) => v.code).join(", ") || "invalid input";
      return new ApiError(response.status, summary, violations);
    }
    if (typeof record.error === "string") {
      return new ApiError(response.status, record.error);
    }
  }
  return new ApiError(response.status, `service returned status ${response.status}`);
}

export class AnalysisClient {
  // serializes analyze calls: at most one in flight at a time
  private tail: Promise<void> = Promise.resolve();

  constructor(
    private readonly baseUrl: string = DEFAULT_SERVICE_URL,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) throw await decodeFailure(response);
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  /**
   * Run an analysis. Calls are serialized: a second analyze issued while
   * one is in flight waits for the first to settle before dispatching.
   */
  analyze(graph: GraphDocument, request: AnalysisRequestBody): Promise<ReportDocument> {
    const run = this.tail.then(() => this.post<ReportDocument>("/api/v1/analyze", { graph, request }));
    this.tail = run.then(
      () => undefined,
      () => undefined,
    );
    return run;
  }

  /** Validate a graph document; resolves to the violation list (empty when valid). */
  async validate(graph: GraphDocument): Promise<Violation[]> {
    const body = await this.post<{ violations: Violation[] }>("/api/v1/validate", graph);
    return body.violations;
  }

  /** Fetch the asset catalog, ordered by severity rank. */
  catalog(): Promise<AssetCategory[]> {
    return this.request<AssetCategory[]>("/api/v1/catalog");
  }
}

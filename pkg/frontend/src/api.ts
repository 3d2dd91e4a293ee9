/** Typed client for the analysis server; all state lives server-side. */

export interface MeasureDto {
  name: string;
  agg: string;
}

export interface FactDto {
  name: string;
  measures: MeasureDto[];
  dimensions: string[];
}

export interface HierarchyDto {
  name: string;
  params: string[]; // finest (level 0) to coarsest
  weak: Record<string, string[]>;
}

export interface DimensionDto {
  name: string;
  hierarchies: HierarchyDto[];
}

export interface SchemaDto {
  name: string;
  facts: FactDto[];
  dimensions: DimensionDto[];
}

export interface AxisDto {
  dim: string;
  hier: string;
  attrs: string[];
}

export interface CellDto {
  row: string[];
  col: string[];
  measure: string;
  value: number;
}

export interface TablePayload {
  subject: { fact: string; specs: string[] };
  rows: AxisDto;
  cols: AxisDto;
  cells: CellDto[];
}

export interface WeightDto {
  element: string;
  kind: string;
  weight: number;
  rule: string;
}

export interface ErrorBody {
  code: string;
  message: string;
  position?: { line: number; col: number };
}

export interface OpRequest {
  kind: "display" | "rotate" | "drilldown" | "rollup";
  fact?: string;
  specs?: { agg: string; measure: string }[];
  rowdim?: string;
  rowhier?: string;
  coldim?: string;
  colhier?: string;
  d_old?: string;
  d_new?: string;
  hier?: string;
  dim?: string;
  attr?: string;
  threshold?: number;
}

export class ApiError extends Error {
  constructor(
    readonly body: ErrorBody,
    readonly status: number,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(body as ErrorBody, response.status);
  }
  return body as T;
}

export class Api {
  constructor(readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async createSession(profile: string): Promise<{ session_id: string; profile: string }> {
    const response = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ profile }),
    });
    return asJson(response);
  }

  async getSchema(): Promise<SchemaDto> {
    return asJson(await fetch(this.url("/schema")));
  }

  async runOp(sessionId: string, op: OpRequest): Promise<TablePayload> {
    const response = await fetch(this.url(`/sessions/${sessionId}/op`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(op),
    });
    return asJson(response);
  }

  async getTable(sessionId: string): Promise<TablePayload> {
    return asJson(await fetch(this.url(`/sessions/${sessionId}/table`)));
  }

  async getHistory(sessionId: string): Promise<{ history: string[] }> {
    return asJson(await fetch(this.url(`/sessions/${sessionId}/history`)));
  }

  async listRules(profile: string): Promise<{ rules: { name: string; source: string }[] }> {
    return asJson(await fetch(this.url(`/profiles/${encodeURIComponent(profile)}/rules`)));
  }

  async addRule(profile: string, source: string): Promise<{ name: string }> {
    const response = await fetch(this.url(`/profiles/${encodeURIComponent(profile)}/rules`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ source }),
    });
    return asJson(response);
  }

  async deleteRule(profile: string, name: string): Promise<void> {
    const response = await fetch(
      this.url(`/profiles/${encodeURIComponent(profile)}/rules/${encodeURIComponent(name)}`),
      { method: "DELETE" },
    );
    await asJson(response);
  }

  async getWeights(
    profile: string,
    params: Record<string, string>,
  ): Promise<{ weights: WeightDto[] }> {
    const query = new URLSearchParams(params).toString();
    return asJson(await fetch(this.url(`/profiles/${encodeURIComponent(profile)}/weights?${query}`)));
  }
}

/** Thin typed client over the jobs-service HTTP API. The fetch function is
 * injectable so tests can stub the wire. */

import type {
  ConfigDoc,
  IngestReport,
  JobSummary,
  ResultEnvelope,
  SchemaDoc,
  SourceName,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly violations: string[] = [],
  ) {
    super(message);
  }
}

async function readError(response: Response): Promise<ApiError> {
  let detail: unknown = null;
  try {
    detail = (await response.json()).detail;
  } catch {
    /* body was not JSON */
  }
  if (detail && typeof detail === "object" && "violations" in detail) {
    const violations = (detail as { violations: string[] }).violations;
    return new ApiError(violations.join("; "), response.status, violations);
  }
  return new ApiError(String(detail ?? response.statusText), response.status);
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly base: string = "",
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) throw await readError(response);
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await readError(response);
    return (await response.json()) as T;
  }

  submitJob(config: ConfigDoc): Promise<{ job_id: string; status: string }> {
    return this.postJson("/api/jobs", config);
  }

  listJobs(): Promise<{ jobs: JobSummary[] }> {
    return this.getJson("/api/jobs");
  }

  jobStatus(jobId: string): Promise<JobSummary> {
    return this.getJson(`/api/jobs/${jobId}`);
  }

  jobResult(jobId: string): Promise<ResultEnvelope> {
    return this.getJson(`/api/jobs/${jobId}/result`);
  }

  exportConfig(jobId: string): Promise<ConfigDoc> {
    return this.getJson(`/api/jobs/${jobId}/config`);
  }

  importConfig(config: ConfigDoc): Promise<{ job_id: string; status: string }> {
    return this.postJson("/api/jobs/import", config);
  }

  schema(source: SourceName): Promise<SchemaDoc> {
    return this.getJson(`/api/schema/${source}`);
  }

  async ingest(source: SourceName, content: string): Promise<IngestReport> {
    const response = await this.fetchFn(`${this.base}/api/ingest/${source}`, {
      method: "POST",
      body: content,
    });
    if (!response.ok) throw await readError(response);
    return (await response.json()) as IngestReport;
  }
}

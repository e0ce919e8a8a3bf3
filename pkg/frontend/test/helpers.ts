import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import type {
  ClusteringReport,
  DiscriminantReport,
  AnomalyReport,
  JobSummary,
  ResultEnvelope,
  SchemaDoc,
} from "../src/types.js";

export function loadFixture<T>(name: string): T {
  // vitest runs with cwd at the frontend root; import.meta.url is not a
  // file: URL under the jsdom environment
  const path = resolve(process.cwd(), "test", "fixtures", name);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

export function discriminantReport(): DiscriminantReport {
  const envelope = loadFixture<ResultEnvelope>("discriminant_result.json");
  return envelope.result!.report as DiscriminantReport;
}

export function anomalyReport(): AnomalyReport {
  const envelope = loadFixture<ResultEnvelope>("anomaly_result.json");
  return envelope.result!.report as AnomalyReport;
}

export function clusteringReport(): ClusteringReport {
  const envelope = loadFixture<ResultEnvelope>("clustering_result.json");
  return envelope.result!.report as ClusteringReport;
}

export function jobsList(): JobSummary[] {
  return loadFixture<{ jobs: JobSummary[] }>("jobs_list.json").jobs;
}

export function schemaDoc(source: "flow" | "hostlog"): SchemaDoc {
  return loadFixture<SchemaDoc>(`schema_${source}.json`);
}

export function click(node: Element): void {
  node.dispatchEvent(new Event("click", { bubbles: true }));
}

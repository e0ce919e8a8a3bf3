/** Document shapes exchanged with the jobs service. */

export type SourceName = "flow" | "hostlog";
export type OperationName = "discriminant" | "anomaly" | "clustering";
export type JobStatusName = "pending" | "running" | "succeeded" | "failed";

export interface WindowDoc {
  start: string;
  end: string;
}

export interface TupleDoc {
  ip_pattern: string;
  window: WindowDoc;
}

export interface SelectorDoc {
  source: SourceName;
  tuples: TupleDoc[];
}

export interface FeaturesDoc {
  mode: "value-count" | "field-sum" | "port-direction-percent" | "contact-count";
  fields: string[];
  unit: "bytes" | "flows" | null;
  granularity: "per-record" | "per-entity";
  top_n: number;
}

export interface DatasetDoc {
  selector: SelectorDoc;
  features: FeaturesDoc;
}

export interface ParamsDoc {
  k: number | null;
  min_cluster_size: number;
  regularization: number;
}

export interface ConfigDoc {
  operation: OperationName;
  dataset_a: DatasetDoc;
  dataset_b: DatasetDoc | null;
  params: ParamsDoc;
}

export interface JobSummary {
  job_id: string;
  operation: OperationName;
  status: JobStatusName;
  created_at: string;
  finished_at: string | null;
  error_message: string | null;
  result_ref: string | null;
}

export interface AttributeEntry {
  attribute: string;
  qualifier: string;
  score: number;
}

export interface DiscriminantReport {
  attributes: AttributeEntry[];
  separation: number;
  direction: number[];
  attribute_names: string[];
}

export interface OutlierScore {
  entity_id: string;
  score: number;
  p_value: number;
  density_rank: number;
}

export interface AnomalyReport {
  scores: OutlierScore[];
}

export interface TreeNodeDoc {
  node_id: number;
  parent_id: number | null;
  lambda_birth: number;
  lambda_death: number;
  size: number;
  stability: number;
}

export interface SelectedClusterDoc {
  cluster_id: number;
  member_ids: string[];
  stability: number;
  parent_cluster_id: number | null;
  is_leaf: boolean;
  size: number;
}

export interface ClusteringReport {
  params: { min_cluster_size: number; k: number };
  tree: { nodes: TreeNodeDoc[] };
  clusters: SelectedClusterDoc[];
  outliers: OutlierScore[];
  annotations: Record<string, { attribute: string; score: number }[]>;
  dropped_attributes: string[];
}

export interface ResultDoc {
  kind: OperationName;
  config: ConfigDoc;
  row_counts: Record<string, number>;
  report: DiscriminantReport | AnomalyReport | ClusteringReport;
}

export interface ResultEnvelope {
  job_id: string;
  status: JobStatusName;
  result?: ResultDoc;
  error_message?: string;
}

export interface SchemaDoc {
  source: SourceName;
  fields: string[];
}

export interface IngestReport {
  ingested: number;
  duplicates: number;
  rejected: number;
  rejects: { line: number; reason: string }[];
}

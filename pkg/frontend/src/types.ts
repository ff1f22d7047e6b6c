/** Wire types for the workbench REST API. */

export interface TensorPayload {
  shape: number[];
  dtype: string;
  data: string; // base64 little-endian float32
}

export interface ModelSummary {
  id: string;
  class_count: number;
  embedding_index: number;
  input_shape: number[];
  layers: string[];
}

export interface DatasetSummary {
  id: string;
  count: number;
  channels: number;
  height: number;
  width: number;
  class_names: string[];
}

export interface ImpactSamplePayload {
  index: number;
  true_label: number;
  original_prediction: number;
  adversarial_prediction: number;
  similarity: number;
  original: TensorPayload;
  adversarial: TensorPayload;
  diff: TensorPayload;
}

export interface ImpactReportPayload {
  original_accuracy: number;
  adversarial_accuracy: number;
  similarity_avg: number;
  similarity_max: number;
  similarity_min: number;
  grade: number;
  samples: ImpactSamplePayload[];
}

export interface DefenseReportPayload {
  kind: string;
  baseline: ImpactReportPayload;
  defended: ImpactReportPayload;
  risk_scores?: number[];
  flag_count?: number;
}

export interface RankedNeuronPayload {
  neuron: number;
  freq_a: number;
  freq_b: number;
  difference: number;
}

export interface MonitorPayload {
  neurons: number[];
  values: number[][]; // [neuron][state]
  predictions: number[];
}

export interface ExplainSamplePayload {
  index: number;
  class_pair: [number, number];
  ranking: RankedNeuronPayload[];
  monitor: MonitorPayload;
}

export interface ExplainPayload {
  layer_index: number;
  tau: number;
  k: number;
  class_counts: number[];
  frequencies: number[][];
  samples: ExplainSamplePayload[];
}

export interface RunRecord {
  format: string;
  run_id: string;
  kind: "attack" | "defense";
  request: Record<string, unknown>;
  report: ImpactReportPayload | DefenseReportPayload;
  explain: ExplainPayload;
}

export interface RunIndexEntry {
  run_id: string;
  kind: string;
  created_at: string;
}

export function isDefenseReport(
  report: ImpactReportPayload | DefenseReportPayload,
): report is DefenseReportPayload {
  return "baseline" in report;
}

export type AttackAlgorithm = "fgsm" | "bim" | "pgd";

export type DefenseKind =
  | "none"
  | "adversarial_training"
  | "dim_reduction_input"
  | "dim_reduction_embedding"
  | "prediction_similarity";

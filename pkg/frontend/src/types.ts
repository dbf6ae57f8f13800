// Wire-format types mirroring the engine's JSON contracts exactly.

export type ValueKind =
  | "signal"
  | "spectrum"
  | "transfer_function"
  | "feature_matrix"
  | "scalar"
  | "label_vector";

export type ParamKind = "int" | "real" | "string" | "enum" | "real-array";

export interface ParamDescriptor {
  name: string;
  kind: ParamKind;
  default: number | string | number[];
  min?: number;
  max?: number;
  enum_values?: string[];
}

export interface PortDescriptor {
  name: string;
  kind: ValueKind;
  required?: boolean;
}

export interface BlockDescriptor {
  type_name: string;
  params: ParamDescriptor[];
  inputs: PortDescriptor[];
  outputs: PortDescriptor[];
}

export type ParamValue = number | string | number[];

export interface GraphBlock {
  id: string;
  type: string;
  params: Record<string, ParamValue>;
}

export interface GraphWire {
  from: string; // "blockId.portName"
  to: string;
}

export interface GraphJson {
  version: 1;
  blocks: GraphBlock[];
  wires: GraphWire[];
  ui?: UiExtension;
}

export interface BlockLayout {
  x: number;
  y: number;
}

export interface UiExtension {
  layout: Record<string, BlockLayout>;
}

// --- run responses -----------------------------------------------------------

export type JsonNumber = number | "inf" | "-inf" | "nan";

export interface SignalPayload {
  kind: "signal";
  block_type?: string;
  sample_rate_hz: number;
  samples: JsonNumber[];
}

export interface SpectrumPayload {
  kind: "spectrum";
  block_type?: string;
  sample_rate_hz: number;
  re: JsonNumber[];
  im: JsonNumber[];
}

export interface TransferFunctionPayload {
  kind: "transfer_function";
  block_type?: string;
  b: JsonNumber[];
  a: JsonNumber[];
}

export interface FeatureMatrixPayload {
  kind: "feature_matrix";
  block_type?: string;
  columns: string[] | null;
  rows: JsonNumber[][];
}

export interface ScalarPayload {
  kind: "scalar";
  block_type?: string;
  value: JsonNumber;
}

export interface LabelVectorPayload {
  kind: "label_vector";
  block_type?: string;
  values: number[];
}

export type OutputPayload =
  | SignalPayload
  | SpectrumPayload
  | TransferFunctionPayload
  | FeatureMatrixPayload
  | ScalarPayload
  | LabelVectorPayload;

export interface RunResponse {
  outputs: Record<string, OutputPayload>;
  engine_version: string;
}

export interface ApiError {
  error: string;
  detail: string;
  block_id?: string;
}

export function asNumber(v: JsonNumber): number {
  if (v === "inf") return Infinity;
  if (v === "-inf") return -Infinity;
  if (v === "nan") return NaN;
  return v;
}

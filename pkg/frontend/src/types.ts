// Wire types mirroring the service API.

export interface DimensionInfo {
  id: string;
  name: string;
  description: string;
  default_weight: number;
}

export interface DatasetInfo {
  name: string;
  gui_count: number;
  dimensions: DimensionInfo[];
}

export interface ConstraintLists {
  positive: string[];
  negative: string[];
}

export type Decomposition = Record<string, ConstraintLists>;

export interface PerDimensionScore {
  pos: number;
  neg: number;
  s: number;
}

export interface SearchRow {
  gui_id: string;
  total: number;
  per_dimension: Record<string, PerDimensionScore>;
}

export interface UsageBlock {
  input_tokens: number;
  output_tokens: number;
  wall_time: number;
  request_count: number;
  model: string;
  cost: number | null;
  unpriced?: boolean;
}

export interface SearchResponse {
  dataset: string;
  query: string;
  decomposition: Decomposition;
  results: SearchRow[];
  usage: UsageBlock;
}

export interface RerankRow {
  gui_id: string;
  stage: 'reranked' | 'embedding';
  aggregate?: number;
  scores?: Record<string, number>;
  flags?: string[];
  total?: number;
}

export interface RerankResponse {
  dataset: string;
  query: string;
  mode: string;
  k: number;
  results: RerankRow[];
  stage1_usage: UsageBlock;
  usage: UsageBlock;
}

export interface ServiceErrorBody {
  error: string;
  detail: string;
}

export type RerankMode = 'text' | 'image';

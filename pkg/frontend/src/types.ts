/** Payload shapes of the query-service HTTP API. */

export type Rect = [number, number, number, number]; // x1, y1, x2, y2

export interface RowDict {
  node1_id: number;
  node1_label: string;
  geometry: [number, number, number, number];
  edge_label: string | null;
  node2_id: number | null;
  node2_label: string | null;
}

export interface WindowResult {
  rows: RowDict[];
  totalRows: number;
  chunks: number;
  queryMs: number | null;
  serializeMs: number | null;
}

export interface ManifestLayer {
  index: number;
  bounds: Rect;
  nodes: number;
  rows: number;
  edges: number;
  criterion?: string | null;
}

export interface Manifest {
  dataset: string;
  directed: boolean;
  criterion: string | null;
  layer_count: number;
  chunk_size: number;
  layers: ManifestLayer[];
}

export interface SearchHit {
  id: number;
  label: string;
  x: number;
  y: number;
}

export interface NeighbourInfo {
  id: number;
  label: string;
  x: number;
  y: number;
}

export interface FocusPayload {
  id: number;
  label: string;
  x: number;
  y: number;
  rows: RowDict[];
  neighbours: NeighbourInfo[];
}

export interface LayerStats {
  node_count: number;
  edge_count: number;
  avg_degree: number;
  density: number;
}

export interface BirdviewData {
  total: number;
  bounds: Rect;
  points: [number, number][];
}

export interface ApiClient {
  manifest(): Promise<Manifest>;
  window(layer: number, rect: Rect, labels: string[] | null, signal?: AbortSignal): Promise<WindowResult>;
  search(layer: number, q: string, limit: number): Promise<SearchHit[]>;
  node(layer: number, id: number): Promise<FocusPayload>;
  stats(layer: number): Promise<LayerStats>;
  birdview(layer: number, maxPoints: number): Promise<BirdviewData>;
}

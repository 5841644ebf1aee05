/** HTTP client for the query service, including ndjson window parsing. */

import type {
  ApiClient, BirdviewData, FocusPayload, LayerStats, Manifest, Rect,
  RowDict, SearchHit, WindowResult,
} from "./types.js";

/** Parse a window response body: chunk lines followed by a summary line. */
export function parseWindowBody(text: string): Omit<WindowResult, "queryMs" | "serializeMs"> {
  const lines = text.trim().length ? text.trim().split("\n") : [];
  if (lines.length === 0) throw new Error("empty window response");
  const summary = JSON.parse(lines[lines.length - 1]);
  const rows: RowDict[] = [];
  for (const line of lines.slice(0, -1)) {
    const chunk = JSON.parse(line);
    if (chunk.count !== chunk.rows.length) {
      throw new Error(`chunk count ${chunk.count} != rows ${chunk.rows.length}`);
    }
    rows.push(...chunk.rows);
  }
  if (rows.length !== summary.total_rows) {
    throw new Error(`reassembled ${rows.length} rows, summary says ${summary.total_rows}`);
  }
  return { rows, totalRows: summary.total_rows, chunks: summary.chunks };
}

type FetchLike = (url: string, init?: { signal?: AbortSignal }) => Promise<{
  ok: boolean;
  status: number;
  text(): Promise<string>;
  headers: { get(name: string): string | null };
}>;

export class HttpApiClient implements ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson(path: string, params: Record<string, string | number>): Promise<any> {
    const qs = new URLSearchParams(
      Object.entries(params).map(([k, v]) => [k, String(v)]),
    );
    const res = await this.fetchImpl(`${this.base}${path}?${qs}`);
    if (!res.ok) throw new Error(`${path} failed with status ${res.status}`);
    return JSON.parse(await res.text());
  }

  async manifest(): Promise<Manifest> {
    return this.getJson("/api/manifest", {});
  }

  async window(layer: number, rect: Rect, labels: string[] | null, signal?: AbortSignal): Promise<WindowResult> {
    const params: Record<string, string | number> = {
      layer, x1: rect[0], y1: rect[1], x2: rect[2], y2: rect[3],
    };
    if (labels !== null) params.labels = labels.join(",");
    const qs = new URLSearchParams(Object.entries(params).map(([k, v]) => [k, String(v)]));
    const res = await this.fetchImpl(`${this.base}/api/window?${qs}`, { signal });
    if (!res.ok) throw new Error(`/api/window failed with status ${res.status}`);
    const body = parseWindowBody(await res.text());
    const q = res.headers.get("X-Query-Ms");
    const s = res.headers.get("X-Serialize-Ms");
    return { ...body, queryMs: q === null ? null : Number(q), serializeMs: s === null ? null : Number(s) };
  }

  async search(layer: number, q: string, limit: number): Promise<SearchHit[]> {
    const body = await this.getJson("/api/search", { layer, q, limit });
    return body.hits;
  }

  async node(layer: number, id: number): Promise<FocusPayload> {
    return this.getJson("/api/node", { layer, id });
  }

  async stats(layer: number): Promise<LayerStats> {
    return this.getJson("/api/stats", { layer });
  }

  async birdview(layer: number, maxPoints: number): Promise<BirdviewData> {
    return this.getJson("/api/birdview", { layer, max_points: maxPoints });
  }
}

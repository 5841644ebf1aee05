/** Headless explorer controller: viewport, layer, filters, focus, fetching.
 *
 * Owns all behavior the panels expose, but knows nothing about the DOM:
 * a render callback receives the current scene. Window fetches are
 * debounced (default 80 ms); at most one request is in flight per settled
 * viewport, and responses that arrive for a superseded request are
 * discarded, so the canvas always shows the latest non-stale answer.
 */

import { sceneFromFocus, sceneFromRows, edgeLabelsOf, type SceneElement } from "./scene.js";
import type { ApiClient, FocusPayload, Manifest, Rect, RowDict, SearchHit } from "./types.js";
import { effectiveWindow, fitBounds, panBy, zoomBy, type Viewport } from "./viewport.js";

export interface AppEvents {
  onScene?(scene: SceneElement[], app: ExplorerApp): void;
  onStatus?(text: string): void;
}

export class ExplorerApp {
  manifest: Manifest | null = null;
  viewport: Viewport;
  layer = 0;
  hiddenLabels = new Set<string>();
  knownLabels = new Set<string>();
  focus: FocusPayload | null = null;
  lastRows: RowDict[] = [];
  lastWindow: Rect | null = null;
  scene: SceneElement[] = [];

  private timer: ReturnType<typeof setTimeout> | null = null;
  private token = 0;
  private inflight: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    width: number,
    height: number,
    private readonly events: AppEvents = {},
    private readonly debounceMs = 80,
  ) {
    this.viewport = { cx: 0, cy: 0, width, height, zoom: 1 };
  }

  async init(): Promise<void> {
    this.manifest = await this.api.manifest();
    const bounds = this.manifest.layers[0]?.bounds ?? [-100, -100, 100, 100];
    this.viewport = fitBounds(bounds, this.viewport.width, this.viewport.height);
    this.scheduleFetch();
  }

  // -- navigation ----------------------------------------------------------

  pan(dxPx: number, dyPx: number): void {
    this.viewport = panBy(this.viewport, dxPx, dyPx);
    this.exitFocus();
    this.scheduleFetch();
  }

  zoom(factor: number): void {
    this.viewport = zoomBy(this.viewport, factor);
    this.exitFocus();
    this.scheduleFetch();
  }

  setLayer(layer: number): void {
    if (this.manifest && (layer < 0 || layer >= this.manifest.layer_count)) {
      throw new Error(`layer ${layer} out of range`);
    }
    this.layer = layer;
    this.exitFocus();
    this.scheduleFetch();   // same rectangle, different layer table
  }

  toggleLabel(label: string, visible: boolean): void {
    if (visible) this.hiddenLabels.delete(label);
    else this.hiddenLabels.add(label);
    this.scheduleFetch();
  }

  // -- keyword search and focus-on-node -------------------------------------

  async search(q: string, limit = 50): Promise<SearchHit[]> {
    return this.api.search(this.layer, q, limit);
  }

  /** Recenter on the node and show only it and its neighbours. */
  async focusOn(id: number): Promise<void> {
    const payload = await this.api.node(this.layer, id);
    this.focus = payload;
    this.viewport = { ...this.viewport, cx: payload.x, cy: payload.y };
    this.scene = sceneFromFocus(payload, this.manifest?.directed ?? true);
    this.events.onScene?.(this.scene, this);
  }

  exitFocus(): void {
    this.focus = null;
  }

  clearFocus(): void {
    this.exitFocus();
    this.scheduleFetch();
  }

  // -- fetching -------------------------------------------------------------

  effectiveWindow(): Rect {
    return effectiveWindow(this.viewport);
  }

  private labelsParam(): string[] | null {
    if (this.hiddenLabels.size === 0) return null;
    return [...this.knownLabels].filter((l) => !this.hiddenLabels.has(l)).sort();
  }

  private scheduleFetch(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    const tok = ++this.token;
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.fire(tok);
    }, this.debounceMs);
  }

  private async fire(tok: number): Promise<void> {
    if (tok !== this.token) return;
    this.inflight?.abort();
    const controller = typeof AbortController !== "undefined" ? new AbortController() : null;
    this.inflight = controller;
    const rect = this.effectiveWindow();
    const layer = this.layer;
    try {
      const res = await this.api.window(layer, rect, this.labelsParam(), controller?.signal);
      if (tok !== this.token) return;   // superseded while in flight
      this.lastRows = res.rows;
      this.lastWindow = rect;
      for (const label of edgeLabelsOf(res.rows)) this.knownLabels.add(label);
      if (this.focus === null) {
        this.scene = sceneFromRows(res.rows, this.manifest?.directed ?? true);
        this.events.onScene?.(this.scene, this);
      }
      this.events.onStatus?.(
        `layer ${layer}: ${res.totalRows} rows in ${res.chunks} chunks`,
      );
    } catch (err) {
      if (tok === this.token) this.events.onStatus?.(`window fetch failed: ${err}`);
    }
  }
}

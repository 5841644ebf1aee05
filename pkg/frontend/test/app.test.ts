/** Behavior of the headless explorer against a canned in-memory backend. */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ExplorerApp } from "../src/app.js";
import { nodeElements, type SceneElement } from "../src/scene.js";
import type {
  ApiClient, BirdviewData, FocusPayload, LayerStats, Manifest, Rect, RowDict, SearchHit,
  WindowResult,
} from "../src/types.js";

// -- fixture: a small author/article neighbourhood ---------------------------

const NODES: Record<number, { label: string; x: number; y: number }> = {
  1: { label: "Christos Faloutsos", x: 0, y: 0 },
  2: { label: "Michalis Faloutsos", x: 200, y: 0 },
  10: { label: "Power Laws", x: 0, y: 100 },
  11: { label: "Graph Sampling", x: -100, y: 0 },
  99: { label: "Unrelated Island", x: 500, y: 500 },
};

function edgeRow(a: number, b: number, label: string): RowDict {
  return {
    node1_id: a, node1_label: NODES[a].label,
    geometry: [NODES[a].x, NODES[a].y, NODES[b].x, NODES[b].y],
    edge_label: label, node2_id: b, node2_label: NODES[b].label,
  };
}

function nodeRow(a: number): RowDict {
  return {
    node1_id: a, node1_label: NODES[a].label,
    geometry: [NODES[a].x, NODES[a].y, NODES[a].x, NODES[a].y],
    edge_label: null, node2_id: null, node2_label: null,
  };
}

const ROWS: RowDict[] = [
  edgeRow(10, 1, "has-author"),
  edgeRow(10, 2, "has-author"),
  edgeRow(11, 1, "has-author"),
  edgeRow(11, 10, "cites"),
  nodeRow(99),
];

class FakeApi implements ApiClient {
  windowCalls: { layer: number; rect: Rect; labels: string[] | null }[] = [];
  gate: (() => void)[] | null = null;   // when set, window() waits to be released

  async manifest(): Promise<Manifest> {
    return {
      dataset: "fixture", directed: true, criterion: null, layer_count: 2,
      chunk_size: 500,
      layers: [
        { index: 0, bounds: [-150, -50, 550, 550], nodes: 5, rows: 5, edges: 4 },
        { index: 1, bounds: [-150, -50, 550, 550], nodes: 2, rows: 2, edges: 1 },
      ],
    };
  }

  private select(layer: number, rect: Rect, labels: string[] | null): RowDict[] {
    const rows = layer === 0 ? ROWS : ROWS.slice(0, 1);
    return rows.filter((r) => {
      const [x1, y1, x2, y2] = r.geometry;
      const inside =
        Math.min(x1, x2) <= rect[2] && Math.max(x1, x2) >= rect[0] &&
        Math.min(y1, y2) <= rect[3] && Math.max(y1, y2) >= rect[1];
      if (!inside) return false;
      if (labels !== null && r.edge_label !== null) return labels.includes(r.edge_label);
      return true;
    });
  }

  async window(layer: number, rect: Rect, labels: string[] | null): Promise<WindowResult> {
    this.windowCalls.push({ layer, rect, labels });
    if (this.gate !== null) {
      await new Promise<void>((resolve) => this.gate!.push(resolve));
    }
    const rows = this.select(layer, rect, labels);
    return { rows, totalRows: rows.length, chunks: 1, queryMs: 0, serializeMs: 0 };
  }

  async search(_layer: number, q: string, limit: number): Promise<SearchHit[]> {
    return Object.entries(NODES)
      .filter(([, n]) => n.label.toLowerCase().includes(q.toLowerCase()))
      .slice(0, limit)
      .map(([id, n]) => ({ id: Number(id), label: n.label, x: n.x, y: n.y }));
  }

  async node(_layer: number, id: number): Promise<FocusPayload> {
    const me = NODES[id];
    const rows = ROWS.filter((r) => r.node1_id === id || r.node2_id === id);
    const neighbourIds = [...new Set(
      rows.flatMap((r) => [r.node1_id, r.node2_id]).filter((n): n is number => n !== null && n !== id),
    )].sort((a, b) => a - b);
    return {
      id, label: me.label, x: me.x, y: me.y, rows,
      neighbours: neighbourIds.map((n) => ({ id: n, label: NODES[n].label, x: NODES[n].x, y: NODES[n].y })),
    };
  }

  async stats(): Promise<LayerStats> {
    return { node_count: 5, edge_count: 4, avg_degree: 1.6, density: 0.2 };
  }

  async birdview(): Promise<BirdviewData> {
    return { total: 5, bounds: [-150, -50, 550, 550], points: [[0, 0]] };
  }
}

// -- harness -----------------------------------------------------------------

let api: FakeApi;
let app: ExplorerApp;
let scenes: SceneElement[][];

beforeEach(async () => {
  vi.useFakeTimers();
  api = new FakeApi();
  scenes = [];
  app = new ExplorerApp(api, 800, 600, { onScene: (s) => scenes.push(s) });
  await app.init();
  await vi.advanceTimersByTimeAsync(200);   // let the initial fetch settle
});

afterEach(() => {
  vi.useRealTimers();
});

describe("pan and zoom fetching", () => {
  it("a burst of pans settles into exactly one window request", async () => {
    const before = api.windowCalls.length;
    for (let i = 0; i < 15; i++) app.pan(5, 3);
    await vi.advanceTimersByTimeAsync(500);
    expect(api.windowCalls.length).toBe(before + 1);
  });

  it("separate settled pans fetch once each", async () => {
    const before = api.windowCalls.length;
    app.pan(50, 0);
    await vi.advanceTimersByTimeAsync(200);
    app.pan(0, 50);
    await vi.advanceTimersByTimeAsync(200);
    expect(api.windowCalls.length).toBe(before + 2);
  });

  it("zooming in halves the requested rectangle", async () => {
    const before = app.effectiveWindow();
    app.zoom(2);
    await vi.advanceTimersByTimeAsync(200);
    const after = api.windowCalls[api.windowCalls.length - 1].rect;
    expect(after[2] - after[0]).toBeCloseTo((before[2] - before[0]) / 2);
    expect(after[3] - after[1]).toBeCloseTo((before[3] - before[1]) / 2);
  });

  it("panning into an empty region clears the canvas", async () => {
    app.viewport = { ...app.viewport, cx: -99000, cy: -99000, zoom: 4 };
    app.pan(1, 0);
    await vi.advanceTimersByTimeAsync(200);
    expect(scenes[scenes.length - 1]).toEqual([]);
  });

  it("stale responses never override newer ones", async () => {
    api.gate = [];
    app.pan(100, 0);                      // request A (will be held)
    await vi.advanceTimersByTimeAsync(100);
    app.pan(-100, 0);                     // request B supersedes A
    await vi.advanceTimersByTimeAsync(100);
    const held = api.gate;
    api.gate = null;
    expect(held.length).toBe(2);
    const lastRect = api.windowCalls[api.windowCalls.length - 1].rect;
    held[1]();                            // B resolves first
    await vi.advanceTimersByTimeAsync(1);
    const sceneAfterB = scenes.length;
    held[0]();                            // A resolves late; must be discarded
    await vi.advanceTimersByTimeAsync(1);
    expect(scenes.length).toBe(sceneAfterB);
    expect(app.lastWindow).toEqual(lastRect);
  });
});

describe("layer panel", () => {
  it("switching layers re-fetches the same rectangle", async () => {
    const rect = app.effectiveWindow();
    app.setLayer(1);
    await vi.advanceTimersByTimeAsync(200);
    const call = api.windowCalls[api.windowCalls.length - 1];
    expect(call.layer).toBe(1);
    expect(call.rect).toEqual(rect);
  });

  it("a filtered layer shows no more nodes than the base layer", async () => {
    const base = nodeElements(scenes[scenes.length - 1]).length;
    app.setLayer(1);
    await vi.advanceTimersByTimeAsync(200);
    const filtered = nodeElements(scenes[scenes.length - 1]).length;
    expect(filtered).toBeLessThanOrEqual(base);
    app.setLayer(0);
    await vi.advanceTimersByTimeAsync(200);
    expect(nodeElements(scenes[scenes.length - 1]).length).toBe(base);
  });

  it("rejects out-of-range layers", () => {
    expect(() => app.setLayer(7)).toThrow(/layer/);
  });
});

describe("search and focus", () => {
  it("finds the Faloutsos nodes", async () => {
    const hits = await app.search("Faloutsos");
    expect(hits.map((h) => h.label)).toEqual([
      "Christos Faloutsos", "Michalis Faloutsos",
    ]);
  });

  it("focusing renders only the node and its neighbours", async () => {
    const hits = await app.search("Christos Faloutsos");
    await app.focusOn(hits[0].id);
    const scene = scenes[scenes.length - 1];
    const ids = nodeElements(scene).map((n) => n.id).sort((a, b) => a - b);
    expect(ids).toEqual([1, 10, 11]);    // the author and the two articles
    const focused = nodeElements(scene).find((n) => n.focused);
    expect(focused?.id).toBe(1);
    for (const el of scene) {
      if (el.kind === "edge") {
        // every drawn edge touches the focused node's coordinates
        const touches =
          (el.x1 === 0 && el.y1 === 0) || (el.x2 === 0 && el.y2 === 0);
        expect(touches).toBe(true);
      }
    }
  });

  it("focus recenters the viewport on the node", async () => {
    await app.focusOn(2);
    expect(app.viewport.cx).toBe(200);
    expect(app.viewport.cy).toBe(0);
  });

  it("empty search yields no hits", async () => {
    expect(await app.search("qqqqq")).toEqual([]);
  });
});

describe("filter panel", () => {
  it("hiding a label removes exactly its rows", async () => {
    await vi.advanceTimersByTimeAsync(200);
    app.toggleLabel("cites", false);
    await vi.advanceTimersByTimeAsync(200);
    const call = api.windowCalls[api.windowCalls.length - 1];
    expect(call.labels).toEqual(["has-author"]);
    const labels = app.lastRows.map((r) => r.edge_label);
    expect(labels).not.toContain("cites");
    expect(labels).toContain("has-author");
    expect(labels).toContain(null);      // node rows survive the filter

    app.toggleLabel("cites", true);
    await vi.advanceTimersByTimeAsync(200);
    expect(api.windowCalls[api.windowCalls.length - 1].labels).toBeNull();
  });
});

/** Turn API rows into drawable elements; pure and easily testable. */

import type { FocusPayload, RowDict } from "./types.js";

export type SceneElement =
  | { kind: "edge"; x1: number; y1: number; x2: number; y2: number; label: string | null; directed: boolean }
  | { kind: "node"; id: number; label: string; x: number; y: number; focused?: boolean };

/** Elements for normal exploration: every row's segment plus deduped endpoint nodes. */
export function sceneFromRows(rows: RowDict[], directed: boolean): SceneElement[] {
  const nodes = new Map<number, { id: number; label: string; x: number; y: number }>();
  const edges: SceneElement[] = [];
  for (const row of rows) {
    const [x1, y1, x2, y2] = row.geometry;
    if (!nodes.has(row.node1_id)) {
      nodes.set(row.node1_id, { id: row.node1_id, label: row.node1_label, x: x1, y: y1 });
    }
    if (row.node2_id !== null) {
      if (!nodes.has(row.node2_id)) {
        nodes.set(row.node2_id, { id: row.node2_id, label: row.node2_label ?? "", x: x2, y: y2 });
      }
      edges.push({ kind: "edge", x1, y1, x2, y2, label: row.edge_label, directed });
    }
  }
  const out: SceneElement[] = [...edges];
  for (const n of nodes.values()) out.push({ kind: "node", ...n });
  return out;
}

/** Focus mode: only the selected node, its neighbours, and connecting edges. */
export function sceneFromFocus(focus: FocusPayload, directed: boolean): SceneElement[] {
  const allowed = new Set<number>([focus.id, ...focus.neighbours.map((n) => n.id)]);
  const out: SceneElement[] = [];
  for (const row of focus.rows) {
    if (row.node2_id === null) continue;
    if (!allowed.has(row.node1_id) || !allowed.has(row.node2_id)) continue;
    const [x1, y1, x2, y2] = row.geometry;
    out.push({ kind: "edge", x1, y1, x2, y2, label: row.edge_label, directed });
  }
  out.push({ kind: "node", id: focus.id, label: focus.label, x: focus.x, y: focus.y, focused: true });
  for (const n of focus.neighbours) {
    if (n.id !== focus.id) out.push({ kind: "node", id: n.id, label: n.label, x: n.x, y: n.y });
  }
  return out;
}

/** Distinct edge labels present in a row set (feeds the filter panel). */
export function edgeLabelsOf(rows: RowDict[]): string[] {
  const seen = new Set<string>();
  for (const row of rows) {
    if (row.edge_label !== null) seen.add(row.edge_label);
  }
  return [...seen].sort();
}

export function nodeElements(scene: SceneElement[]): Extract<SceneElement, { kind: "node" }>[] {
  return scene.filter((e): e is Extract<SceneElement, { kind: "node" }> => e.kind === "node");
}

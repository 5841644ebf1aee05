/** Viewport math shared by the canvas, the scheduler, and the birdview. */

import type { Rect } from "./types.js";

export interface Viewport {
  cx: number;
  cy: number;
  width: number;   // client pixels
  height: number;
  zoom: number;    // > 0; world units shrink by 1/zoom
}

/** Query rectangle for the current viewport: center +- size / (2 * zoom).
 *  Mirrors the server rule so both sides agree on what a window means. */
export function effectiveWindow(v: Viewport): Rect {
  if (!(v.zoom > 0) || !Number.isFinite(v.zoom)) {
    throw new Error(`zoom must be positive, got ${v.zoom}`);
  }
  const hw = v.width / (2 * v.zoom);
  const hh = v.height / (2 * v.zoom);
  return [v.cx - hw, v.cy - hh, v.cx + hw, v.cy + hh];
}

export function panBy(v: Viewport, dxPx: number, dyPx: number): Viewport {
  return { ...v, cx: v.cx - dxPx / v.zoom, cy: v.cy - dyPx / v.zoom };
}

export function zoomBy(v: Viewport, factor: number): Viewport {
  const zoom = v.zoom * factor;
  if (!(zoom > 0)) throw new Error("zoom must stay positive");
  return { ...v, zoom };
}

/** Viewport centered on the bounds, zoomed out enough to show all of it. */
export function fitBounds(bounds: Rect, width: number, height: number): Viewport {
  const [x1, y1, x2, y2] = bounds;
  const w = Math.max(x2 - x1, 1e-9);
  const h = Math.max(y2 - y1, 1e-9);
  const zoom = 0.9 * Math.min(width / w, height / h);
  return { cx: (x1 + x2) / 2, cy: (y1 + y2) / 2, width, height, zoom };
}

export function worldToScreen(v: Viewport, x: number, y: number): [number, number] {
  return [(x - v.cx) * v.zoom + v.width / 2, (y - v.cy) * v.zoom + v.height / 2];
}

export function screenToWorld(v: Viewport, sx: number, sy: number): [number, number] {
  return [(sx - v.width / 2) / v.zoom + v.cx, (sy - v.height / 2) / v.zoom + v.cy];
}

/** The current effective window expressed in overview-image pixels. */
export function birdviewIndicator(
  planeBounds: Rect,
  v: Viewport,
  overviewW: number,
  overviewH: number,
): Rect {
  const [bx1, by1, bx2, by2] = planeBounds;
  const sx = overviewW / Math.max(bx2 - bx1, 1e-9);
  const sy = overviewH / Math.max(by2 - by1, 1e-9);
  const [wx1, wy1, wx2, wy2] = effectiveWindow(v);
  return [(wx1 - bx1) * sx, (wy1 - by1) * sy, (wx2 - bx1) * sx, (wy2 - by1) * sy];
}

export function rectsEqual(a: Rect, b: Rect, eps = 1e-9): boolean {
  return a.every((val, i) => Math.abs(val - b[i]) <= eps);
}

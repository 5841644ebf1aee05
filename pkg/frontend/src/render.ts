/** Canvas rendering of a scene; hit-testing against drawn nodes. */

import type { SceneElement } from "./scene.js";
import { worldToScreen, type Viewport } from "./viewport.js";

const NODE_RADIUS = 4;
const ARROW_LEN = 8;
const LABEL_ZOOM_MIN = 0.5; // labels get unreadable further out than this

export function drawScene(
  ctx: CanvasRenderingContext2D,
  v: Viewport,
  scene: SceneElement[],
): void {
  ctx.clearRect(0, 0, v.width, v.height);
  ctx.save();
  ctx.lineWidth = 1;
  for (const el of scene) {
    if (el.kind !== "edge") continue;
    const [sx1, sy1] = worldToScreen(v, el.x1, el.y1);
    const [sx2, sy2] = worldToScreen(v, el.x2, el.y2);
    ctx.strokeStyle = "#9aa7b8";
    ctx.beginPath();
    ctx.moveTo(sx1, sy1);
    ctx.lineTo(sx2, sy2);
    ctx.stroke();
    if (el.directed && (sx1 !== sx2 || sy1 !== sy2)) {
      drawArrowHead(ctx, sx1, sy1, sx2, sy2);
    }
  }
  for (const el of scene) {
    if (el.kind !== "node") continue;
    const [sx, sy] = worldToScreen(v, el.x, el.y);
    ctx.fillStyle = el.focused ? "#d9480f" : "#1c64d9";
    ctx.beginPath();
    ctx.arc(sx, sy, el.focused ? NODE_RADIUS + 2 : NODE_RADIUS, 0, 2 * Math.PI);
    ctx.fill();
    if (v.zoom >= LABEL_ZOOM_MIN && el.label) {
      ctx.fillStyle = "#23282e";
      ctx.font = "11px sans-serif";
      ctx.fillText(el.label, sx + NODE_RADIUS + 2, sy - NODE_RADIUS);
    }
  }
  ctx.restore();
}

function drawArrowHead(
  ctx: CanvasRenderingContext2D,
  x1: number, y1: number, x2: number, y2: number,
): void {
  const angle = Math.atan2(y2 - y1, x2 - x1);
  // pull the tip a node-radius back so it is not hidden under the target dot
  const tipX = x2 - NODE_RADIUS * Math.cos(angle);
  const tipY = y2 - NODE_RADIUS * Math.sin(angle);
  ctx.beginPath();
  ctx.moveTo(tipX, tipY);
  ctx.lineTo(
    tipX - ARROW_LEN * Math.cos(angle - Math.PI / 7),
    tipY - ARROW_LEN * Math.sin(angle - Math.PI / 7),
  );
  ctx.lineTo(
    tipX - ARROW_LEN * Math.cos(angle + Math.PI / 7),
    tipY - ARROW_LEN * Math.sin(angle + Math.PI / 7),
  );
  ctx.closePath();
  ctx.fillStyle = "#9aa7b8";
  ctx.fill();
}

/** Topmost node within `radiusPx` of the screen point, or null. */
export function hitTestNode(
  scene: SceneElement[],
  v: Viewport,
  sx: number,
  sy: number,
  radiusPx = 6,
): Extract<SceneElement, { kind: "node" }> | null {
  let best: Extract<SceneElement, { kind: "node" }> | null = null;
  let bestD = radiusPx;
  for (const el of scene) {
    if (el.kind !== "node") continue;
    const [ex, ey] = worldToScreen(v, el.x, el.y);
    const d = Math.hypot(ex - sx, ey - sy);
    if (d <= bestD) {
      best = el;
      bestD = d;
    }
  }
  return best;
}

export function drawBirdview(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  points: [number, number][],
  bounds: [number, number, number, number],
  indicator: [number, number, number, number],
): void {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#f4f6f8";
  ctx.fillRect(0, 0, w, h);
  const sx = w / Math.max(bounds[2] - bounds[0], 1e-9);
  const sy = h / Math.max(bounds[3] - bounds[1], 1e-9);
  ctx.fillStyle = "#7a8aa0";
  for (const [x, y] of points) {
    ctx.fillRect((x - bounds[0]) * sx, (y - bounds[1]) * sy, 1, 1);
  }
  ctx.strokeStyle = "#d9480f";
  ctx.lineWidth = 1.5;
  const [ix1, iy1, ix2, iy2] = indicator;
  ctx.strokeRect(ix1, iy1, ix2 - ix1, iy2 - iy1);
}

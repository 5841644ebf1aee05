/** Browser bootstrap: wires the headless app to the panel DOM. */

import { HttpApiClient } from "./api.js";
import { ExplorerApp } from "./app.js";
import { drawBirdview, drawScene, hitTestNode } from "./render.js";
import { edgeLabelsOf } from "./scene.js";
import { birdviewIndicator } from "./viewport.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

async function boot(): Promise<void> {
  const canvas = byId<HTMLCanvasElement>("canvas");
  const ctx = canvas.getContext("2d")!;
  const birdCanvas = byId<HTMLCanvasElement>("birdview");
  const birdCtx = birdCanvas.getContext("2d")!;
  const status = byId<HTMLElement>("status");

  const api = new HttpApiClient("");
  const app = new ExplorerApp(api, canvas.width, canvas.height, {
    onScene: (scene) => {
      drawScene(ctx, app.viewport, scene);
      refreshFilters();
      void refreshBirdview();
    },
    onStatus: (text) => {
      status.textContent = text;
    },
  });

  await app.init();
  const manifest = app.manifest!;
  byId<HTMLElement>("dataset").textContent =
    `${manifest.dataset} (${manifest.criterion ?? "no criterion"})`;

  // layer panel
  const layerSelect = byId<HTMLSelectElement>("layer");
  manifest.layers.forEach((layer) => {
    const opt = document.createElement("option");
    opt.value = String(layer.index);
    opt.textContent = `layer ${layer.index} (${layer.nodes} nodes, ${layer.edges} edges)`;
    layerSelect.appendChild(opt);
  });
  layerSelect.addEventListener("change", () => {
    app.setLayer(Number(layerSelect.value));
    void refreshStats();
  });

  // pan by dragging, zoom with the wheel
  let dragging = false;
  let last: [number, number] = [0, 0];
  canvas.addEventListener("mousedown", (e) => {
    dragging = true;
    last = [e.offsetX, e.offsetY];
  });
  window.addEventListener("mouseup", () => (dragging = false));
  canvas.addEventListener("mousemove", (e) => {
    if (!dragging) return;
    app.pan(e.offsetX - last[0], e.offsetY - last[1]);
    last = [e.offsetX, e.offsetY];
    drawScene(ctx, app.viewport, app.scene);
    void refreshBirdview();
  });
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    app.zoom(e.deltaY < 0 ? 1.25 : 0.8);
    drawScene(ctx, app.viewport, app.scene);
    void refreshBirdview();
  });

  // click: node info + focus mode
  canvas.addEventListener("click", (e) => {
    const hit = hitTestNode(app.scene, app.viewport, e.offsetX, e.offsetY);
    if (!hit) return;
    byId<HTMLElement>("node-info").textContent = `#${hit.id} ${hit.label}`;
    if (byId<HTMLInputElement>("focus-mode").checked) {
      void app.focusOn(hit.id);
    }
  });
  byId<HTMLInputElement>("focus-mode").addEventListener("change", (e) => {
    if (!(e.target as HTMLInputElement).checked) app.clearFocus();
  });

  // search panel
  const searchBox = byId<HTMLInputElement>("search");
  const results = byId<HTMLUListElement>("results");
  byId<HTMLButtonElement>("search-btn").addEventListener("click", () => void runSearch());
  searchBox.addEventListener("keydown", (e) => {
    if (e.key === "Enter") void runSearch();
  });
  async function runSearch(): Promise<void> {
    results.replaceChildren();
    if (!searchBox.value) return;
    const hits = await app.search(searchBox.value, 50);
    for (const hit of hits) {
      const li = document.createElement("li");
      li.textContent = hit.label;
      li.addEventListener("click", () => void app.focusOn(hit.id));
      results.appendChild(li);
    }
  }

  // filter panel: checkboxes per edge label seen so far
  const filters = byId<HTMLElement>("filters");
  function refreshFilters(): void {
    const labels = [...new Set([...app.knownLabels, ...edgeLabelsOf(app.lastRows)])].sort();
    filters.replaceChildren();
    for (const label of labels) {
      const row = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = !app.hiddenLabels.has(label);
      box.addEventListener("change", () => app.toggleLabel(label, box.checked));
      row.appendChild(box);
      row.appendChild(document.createTextNode(" " + label));
      filters.appendChild(row);
    }
  }

  async function refreshStats(): Promise<void> {
    const s = await api.stats(app.layer);
    byId<HTMLElement>("stats").textContent =
      `nodes ${s.node_count} · edges ${s.edge_count} · ` +
      `avg degree ${s.avg_degree.toFixed(2)} · density ${s.density.toExponential(2)}`;
  }

  async function refreshBirdview(): Promise<void> {
    const bounds = app.manifest!.layers[app.layer]?.bounds;
    if (!bounds) return;
    const data = await api.birdview(app.layer, 2000);
    const ind = birdviewIndicator(bounds, app.viewport, birdCanvas.width, birdCanvas.height);
    drawBirdview(birdCtx, birdCanvas.width, birdCanvas.height, data.points, bounds, ind);
  }

  await refreshStats();
  await refreshBirdview();
}

void boot();

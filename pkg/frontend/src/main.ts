import { ApiClient } from "./api";
import { countLoops, rawMetricStrings } from "./metrics";
import {
  SliceGate,
  initialState,
  setPlaneNormal,
  stepOffset,
} from "./state";
import type { ModelInfo, SliceResult, Vec3 } from "./types";
import { Viewer } from "./viewer";

const api = new ApiClient();
const state = initialState();

const el = (id: string) => document.getElementById(id)!;
const banner = el("banner");
const panel = el("metrics");
const annotationBox = el("annotation-box");
const modelSelect = el("model-select") as HTMLSelectElement;
const offsetLabel = el("offset-label");

function showError(message: string): void {
  banner.textContent = message;
  banner.style.display = "block";
}

function clearError(): void {
  banner.style.display = "none";
}

const viewer = new Viewer(el("canvas-host"));
let info: ModelInfo | null = null;

const gate = new SliceGate(
  (req) => api.slice(req),
  (raw) => {
    clearError();
    state.lastRawResponse = raw;
    state.lastResult = JSON.parse(raw) as SliceResult;
    viewer.setSliceOverlay(state.lastResult);
    renderMetrics(raw);
  },
  (err) => showError(`slice failed: ${err}`)
);

function renderMetrics(raw: string): void {
  const loops = countLoops(raw);
  if (loops === 0) {
    panel.innerHTML = "<em>no intersection at this offset</em>";
    return;
  }
  const rows: string[] = [];
  for (let i = 0; i < loops; i++) {
    const m = rawMetricStrings(raw, i);
    rows.push(
      `<h3>loop ${i}</h3><table>` +
        ["equivalent_diameter", "min_feret", "max_feret", "area", "perimeter"]
          .map((k) => `<tr><td>${k}</td><td>${m[k] ?? "?"} mm</td></tr>`)
          .join("") +
        "</table>"
    );
  }
  panel.innerHTML = rows.join("");
}

function requestSlice(): void {
  if (!state.modelId) return;
  offsetLabel.textContent = state.offset.toFixed(3);
  gate.request({
    model: state.modelId,
    normal: state.normal,
    offset: state.offset,
  });
}

function applyNormal(normal: Vec3): void {
  if (!info) return;
  setPlaneNormal(state, normal, info.bbox.min, info.bbox.max);
  const diag = Math.hypot(
    info.bbox.max[0] - info.bbox.min[0],
    info.bbox.max[1] - info.bbox.min[1],
    info.bbox.max[2] - info.bbox.min[2]
  );
  viewer.setCutPlane(state.normal, state.offset, diag);
  requestSlice();
}

async function loadModel(id: string): Promise<void> {
  try {
    clearError();
    state.modelId = id;
    info = await api.modelInfo(id);
    const geometry = await api.geometry(id);
    viewer.setModel(geometry, info.bbox.min, info.bbox.max);
    const annotations = await api.annotations(id);
    const diag = Math.hypot(
      info.bbox.max[0] - info.bbox.min[0],
      info.bbox.max[1] - info.bbox.min[1],
      info.bbox.max[2] - info.bbox.min[2]
    );
    viewer.setAnnotations(annotations, diag / 30);
    state.offset = 0;
    applyNormal(state.normal);
  } catch (err) {
    showError(`failed to load ${id}: ${err}`);
  }
}

el("canvas-host").addEventListener(
  "wheel",
  (ev) => {
    ev.preventDefault();
    stepOffset(state, ev.deltaY > 0 ? 1 : -1);
    if (info) {
      const diag = Math.hypot(
        info.bbox.max[0] - info.bbox.min[0],
        info.bbox.max[1] - info.bbox.min[1],
        info.bbox.max[2] - info.bbox.min[2]
      );
      viewer.setCutPlane(state.normal, state.offset, diag);
    }
    requestSlice();
  },
  { passive: false }
);

el("canvas-host").addEventListener("click", (ev) => {
  const hit = viewer.pickAnnotation(ev.clientX, ev.clientY);
  if (hit) {
    annotationBox.innerHTML = `<strong>${hit.id}. ${hit.title}</strong><p>${hit.text}</p>`;
    annotationBox.style.display = "block";
  } else {
    annotationBox.style.display = "none";
  }
});

for (const axis of ["x", "y", "z"] as const) {
  el(`axis-${axis}`).addEventListener("click", () => {
    const normal: Vec3 = [
      axis === "x" ? 1 : 0,
      axis === "y" ? 1 : 0,
      axis === "z" ? 1 : 0,
    ];
    applyNormal(normal);
  });
}
el("axis-view").addEventListener("click", () =>
  applyNormal(viewer.viewDirection())
);
(el("toggle-annotations") as HTMLInputElement).addEventListener(
  "change",
  (ev) => {
    state.annotationsVisible = (ev.target as HTMLInputElement).checked;
    viewer.setAnnotationsVisible(state.annotationsVisible);
  }
);

modelSelect.addEventListener("change", () => loadModel(modelSelect.value));

(async () => {
  try {
    const models = await api.listModels();
    for (const id of models) {
      const opt = document.createElement("option");
      opt.value = opt.textContent = id;
      modelSelect.appendChild(opt);
    }
    if (models.length) await loadModel(models[0]);
  } catch (err) {
    showError(`service unreachable: ${err}`);
  }
})();

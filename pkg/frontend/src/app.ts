/**
 * Browser wiring: upload form, filter panel, level stepper, SVG viewport,
 * and hover cards. All analytics come from the server; this file only
 * moves state between the URL, the form controls, and the API.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  DEFAULT_STATE,
  ExplorerState,
  clearFilters,
  decodeState,
  encodeState,
  filterParams,
  stepLevel,
  toggleTopic,
} from "./filterState.js";
import {
  edgeDetailFromAttrs,
  formatEdgeTooltip,
  formatVertexTooltip,
} from "./tooltip.js";
import type { LevelsJson, ModelJson } from "./types.js";

const api = new ApiClient("");

let state: ExplorerState = { ...DEFAULT_STATE };
let model: ModelJson | null = null;
let levels: LevelsJson | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function setStatus(message: string, isError = false): void {
  const status = el<HTMLDivElement>("status");
  status.textContent = message;
  status.className = isError ? "status error" : "status";
}

function syncUrl(): void {
  history.replaceState(null, "", `?${encodeState(state)}`);
}

function depth(): number {
  return levels?.depth ?? 0;
}

async function refreshView(): Promise<void> {
  if (!state.datasetId) return;
  syncUrl();
  renderPanel();
  try {
    const { svg, report } = await api.getView(state.datasetId, filterParams(state));
    el<HTMLDivElement>("viewport").innerHTML = svg;
    const selected = Object.values(report.statuses).filter((s) => s === "selected").length;
    const greyed = Object.keys(report.statuses).length - selected;
    setStatus(
      `level ${report.level} of ${report.depth} (${report.mode}): ` +
        `${selected} selected, ${greyed} greyed`,
    );
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    setStatus(err instanceof ApiError ? `server: ${err.message}` : String(err), true);
  }
}

function renderPanel(): void {
  const topicsBox = el<HTMLDivElement>("topics");
  topicsBox.replaceChildren();
  for (const vertex of model?.vertices ?? []) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = state.topics.includes(vertex.label);
    box.addEventListener("change", () => {
      state = toggleTopic(state, vertex.label);
      void refreshView();
    });
    label.append(box, ` ${vertex.label}`);
    topicsBox.append(label);
  }

  el<HTMLSelectElement>("topic-mode").value = state.topicMode;
  el<HTMLInputElement>("achv-min").value = state.achvMin ?? "";
  el<HTMLInputElement>("achv-max").value = state.achvMax ?? "";
  el<HTMLInputElement>("cov-min").value = state.covMin === null ? "" : String(state.covMin);
  el<HTMLInputElement>("cov-max").value = state.covMax === null ? "" : String(state.covMax);
  el<HTMLInputElement>("cumulative").checked = state.mode === "cumulative";
  const shownLevel = state.level ?? (depth() > 0 ? depth() : null);
  el<HTMLSpanElement>("level-label").textContent = shownLevel === null ? "-" : String(shownLevel);
}

function readPanelIntoState(): void {
  const text = (id: string) => {
    const value = el<HTMLInputElement>(id).value.trim();
    return value === "" ? null : value;
  };
  const int = (id: string) => {
    const value = text(id);
    return value === null ? null : Number.parseInt(value, 10);
  };
  state = {
    ...state,
    topicMode: el<HTMLSelectElement>("topic-mode").value === "all" ? "all" : "any",
    achvMin: text("achv-min"),
    achvMax: text("achv-max"),
    covMin: int("cov-min"),
    covMax: int("cov-max"),
    mode: el<HTMLInputElement>("cumulative").checked ? "cumulative" : "accumulative",
  };
  if (state.topics.length === 0) state = { ...state, topicMode: "any" };
}

async function loadDataset(datasetId: string): Promise<void> {
  model = await api.getModel(datasetId);
  levels = await api.getLevels(datasetId);
  state = { ...state, datasetId };
  el<HTMLDivElement>("explorer").hidden = false;
  await refreshView();
}

function wireTooltip(): void {
  const viewport = el<HTMLDivElement>("viewport");
  const card = el<HTMLDivElement>("tooltip");
  viewport.addEventListener("mousemove", (event) => {
    const target = event.target as Element | null;
    const edge = target?.closest("[data-id]");
    const vertex = target?.closest("[data-topic]");
    let lines: string[] = [];
    if (edge) {
      const detail = edgeDetailFromAttrs((name) => edge.getAttribute(name));
      if (detail) lines = formatEdgeTooltip(detail);
    } else if (vertex && model) {
      lines = formatVertexTooltip(model, vertex.getAttribute("data-topic") ?? "");
    }
    if (lines.length === 0) {
      card.hidden = true;
      return;
    }
    card.hidden = false;
    card.replaceChildren(
      ...lines.map((line) => {
        const row = document.createElement("div");
        row.textContent = line;
        return row;
      }),
    );
    card.style.left = `${event.pageX + 14}px`;
    card.style.top = `${event.pageY + 14}px`;
  });
  viewport.addEventListener("mouseleave", () => {
    card.hidden = true;
  });
}

function wireControls(): void {
  el<HTMLButtonElement>("level-down").addEventListener("click", () => {
    state = stepLevel(state, -1, depth());
    void refreshView();
  });
  el<HTMLButtonElement>("level-up").addEventListener("click", () => {
    state = stepLevel(state, 1, depth());
    void refreshView();
  });
  el<HTMLButtonElement>("apply").addEventListener("click", () => {
    readPanelIntoState();
    void refreshView();
  });
  el<HTMLButtonElement>("clear").addEventListener("click", () => {
    state = clearFilters(state);
    void refreshView();
  });
  el<HTMLFormElement>("upload-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      try {
        const sqaFile = el<HTMLInputElement>("sqa-file").files?.[0];
        const qtFile = el<HTMLInputElement>("qt-file").files?.[0];
        if (!sqaFile || !qtFile) {
          setStatus("choose both CSV files first", true);
          return;
        }
        const uploaded = await api.postDataset(await sqaFile.text(), await qtFile.text());
        setStatus(
          `dataset ${uploaded.dataset_id}: ${uploaded.vertices} topics, ` +
            `${uploaded.hyperedges} hyperedges`,
        );
        await loadDataset(uploaded.dataset_id);
      } catch (err) {
        setStatus(err instanceof ApiError ? `upload failed: ${err.message}` : String(err), true);
      }
    })();
  });
  window.addEventListener("popstate", () => {
    void restoreFromUrl();
  });
}

async function restoreFromUrl(): Promise<void> {
  state = decodeState(location.search);
  if (state.datasetId) {
    try {
      await loadDataset(state.datasetId);
    } catch (err) {
      setStatus(err instanceof ApiError ? err.message : String(err), true);
    }
  }
}

wireControls();
wireTooltip();
void restoreFromUrl();

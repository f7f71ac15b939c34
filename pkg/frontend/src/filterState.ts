/**
 * Explorer state and its URL encoding.
 *
 * The whole view configuration lives in the query string: the dataset id
 * plus the server's filter keys, spelled exactly as the API expects them
 * (topics, topic_mode, achv_min, achv_max, achv_extremum, cov_min,
 * cov_max, cov_extremum, level, mode). Reloading a URL therefore restores
 * the identical view, and the filter portion can be forwarded verbatim.
 */

export type TopicMode = "any" | "all";
export type ViewMode = "cumulative" | "accumulative";
export type Extremum = "level-min" | "level-max";

export interface ExplorerState {
  datasetId: string | null;
  topics: string[]; // kept sorted for stable URLs
  topicMode: TopicMode;
  achvMin: string | null; // decimal or "num/den" text, passed through to the server
  achvMax: string | null;
  achvExtremum: Extremum | null;
  covMin: number | null;
  covMax: number | null;
  covExtremum: Extremum | null;
  mode: ViewMode;
  level: number | null; // null = deepest level
}

export const DEFAULT_STATE: ExplorerState = {
  datasetId: null,
  topics: [],
  topicMode: "any",
  achvMin: null,
  achvMax: null,
  achvExtremum: null,
  covMin: null,
  covMax: null,
  covExtremum: null,
  mode: "cumulative",
  level: null,
};

/** Filter parameters in the server's canonical key order (no dataset id). */
export function filterParams(state: ExplorerState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.topics.length > 0) {
    params.set("topics", [...state.topics].sort().join(","));
    params.set("topic_mode", state.topicMode);
  }
  if (state.achvMin !== null) params.set("achv_min", state.achvMin);
  if (state.achvMax !== null) params.set("achv_max", state.achvMax);
  if (state.achvExtremum !== null) params.set("achv_extremum", state.achvExtremum);
  if (state.covMin !== null) params.set("cov_min", String(state.covMin));
  if (state.covMax !== null) params.set("cov_max", String(state.covMax));
  if (state.covExtremum !== null) params.set("cov_extremum", state.covExtremum);
  if (state.level !== null) params.set("level", String(state.level));
  params.set("mode", state.mode);
  return params;
}

/** Full page query string: dataset id first, then the filter keys. */
export function encodeState(state: ExplorerState): string {
  const params = new URLSearchParams();
  if (state.datasetId) params.set("dataset", state.datasetId);
  for (const [key, value] of filterParams(state)) params.set(key, value);
  return params.toString();
}

function intOrNull(value: string | null): number | null {
  if (value === null || value === "") return null;
  const parsed = Number.parseInt(value, 10);
  return Number.isFinite(parsed) ? parsed : null;
}

function extremumOrNull(value: string | null): Extremum | null {
  return value === "level-min" || value === "level-max" ? value : null;
}

export function decodeState(query: string): ExplorerState {
  const params = new URLSearchParams(query);
  const topicsRaw = params.get("topics");
  const topics = topicsRaw ? topicsRaw.split(",").filter((t) => t !== "").sort() : [];
  const topicMode = params.get("topic_mode") === "all" ? "all" : "any";
  return {
    datasetId: params.get("dataset"),
    topics,
    topicMode: topics.length > 0 ? topicMode : "any",
    achvMin: params.get("achv_min"),
    achvMax: params.get("achv_max"),
    achvExtremum: extremumOrNull(params.get("achv_extremum")),
    covMin: intOrNull(params.get("cov_min")),
    covMax: intOrNull(params.get("cov_max")),
    covExtremum: extremumOrNull(params.get("cov_extremum")),
    mode: params.get("mode") === "accumulative" ? "accumulative" : "cumulative",
    level: intOrNull(params.get("level")),
  };
}

/** Step the level by +-1, clamped to [1, depth]; mode is preserved. */
export function stepLevel(
  state: ExplorerState,
  direction: 1 | -1,
  depth: number,
): ExplorerState {
  if (depth < 1) return state;
  const current = state.level ?? depth;
  const next = Math.min(depth, Math.max(1, current + direction));
  return { ...state, level: next };
}

export function toggleTopic(state: ExplorerState, topic: string): ExplorerState {
  const topics = state.topics.includes(topic)
    ? state.topics.filter((t) => t !== topic)
    : [...state.topics, topic].sort();
  return { ...state, topics, topicMode: topics.length > 0 ? state.topicMode : "any" };
}

export function clearFilters(state: ExplorerState): ExplorerState {
  return { ...DEFAULT_STATE, datasetId: state.datasetId, mode: state.mode, level: state.level };
}

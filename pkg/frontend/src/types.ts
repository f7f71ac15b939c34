/** Wire shapes served by the topicmesh HTTP API. */

export interface VertexJson {
  label: string;
  index: number;
}

export interface ContributorJson {
  question_id: string;
  attempts: number;
  correct: number;
}

export interface EdgeJson {
  id: string;
  topics: string[];
  coverage: number;
  achievement_num: number;
  achievement_den: number;
  contributors: ContributorJson[];
}

export interface ModelJson {
  vertices: VertexJson[];
  edges: EdgeJson[];
  diagnostics: { zero_coverage_topic_sets: string[][] };
}

export interface LevelsJson {
  dataset_id: string;
  depth: number;
  levels: { level: number; edges: string[] }[];
}

export interface ViewLevelJson {
  level: number;
  selected: string[];
  greyed: string[];
}

export interface ViewEdgeJson {
  id: string;
  topics: string[];
  level: number;
  coverage: number;
  achievement_num: number;
  achievement_den: number;
  achievement_display: string;
  status: "selected" | "greyed";
}

export interface ViewReportJson {
  filter: Record<string, string>;
  mode: string;
  level: number;
  depth: number;
  levels: ViewLevelJson[];
  statuses: Record<string, "selected" | "greyed">;
  edges: ViewEdgeJson[];
  legend: {
    coverage_min: number;
    coverage_max: number;
    achievement_min: [number, number];
    achievement_max: [number, number];
  } | null;
}

export interface UploadResponseJson {
  dataset_id: string;
  vertices: number;
  hyperedges: number;
  zero_coverage_sets: number;
}

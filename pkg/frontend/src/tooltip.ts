/**
 * Edge and vertex detail cards, fed entirely by server output.
 *
 * Every number shown comes from the SVG's data attributes or the model
 * JSON; the client never recomputes coverage or achievement.
 */

import type { EdgeJson, ModelJson } from "./types.js";

export interface ContributorDetail {
  questionId: string;
  attempts: number;
  correct: number;
}

export interface EdgeDetail {
  id: string;
  topics: string[];
  coverage: number;
  achievementNum: number;
  achievementDen: number;
  display: string;
  status: string;
  contributors: ContributorDetail[];
}

/** "Q5:4:2;Q7:5:2" -> [{questionId: "Q5", attempts: 4, correct: 2}, ...] */
export function parseContributors(text: string): ContributorDetail[] {
  if (!text) return [];
  return text.split(";").map((chunk) => {
    const [questionId, attempts, correct] = chunk.split(":");
    return {
      questionId,
      attempts: Number.parseInt(attempts, 10),
      correct: Number.parseInt(correct, 10),
    };
  });
}

type AttrReader = (name: string) => string | null;

/** Build the detail card model from an edge glyph's data attributes. */
export function edgeDetailFromAttrs(attr: AttrReader): EdgeDetail | null {
  const id = attr("data-id");
  const achievement = attr("data-achievement");
  if (!id || !achievement) return null;
  const [num, den] = achievement.split("/").map((part) => Number.parseInt(part, 10));
  return {
    id,
    topics: (attr("data-topics") ?? "").split(",").filter((t) => t !== ""),
    coverage: Number.parseInt(attr("data-coverage") ?? "0", 10),
    achievementNum: num,
    achievementDen: Number.isFinite(den) ? den : 1,
    display: attr("data-achievement-display") ?? "",
    status: attr("data-status") ?? "selected",
    contributors: parseContributors(attr("data-contributors") ?? ""),
  };
}

export function percentOf(num: number, den: number): string {
  return `${Math.round((num * 100) / den)}%`;
}

/** Lines for the hover card, e.g. "coverage 13, achievement 7/13 (54%)". */
export function formatEdgeTooltip(detail: EdgeDetail): string[] {
  const lines = [
    `{${detail.topics.join(", ")}}`,
    `coverage ${detail.coverage}, achievement ${detail.achievementNum}/${detail.achievementDen} ` +
      `(${percentOf(detail.achievementNum, detail.achievementDen)})`,
  ];
  if (detail.status === "greyed") lines.push("filtered out");
  for (const c of detail.contributors) {
    lines.push(`${c.questionId}: ${c.correct}/${c.attempts} correct`);
  }
  return lines;
}

/** Hyperedges incident to a topic, straight from the model JSON. */
export function incidentEdges(model: ModelJson, topic: string): EdgeJson[] {
  return model.edges.filter((edge) => edge.topics.includes(topic));
}

export function formatVertexTooltip(model: ModelJson, topic: string): string[] {
  const edges = incidentEdges(model, topic);
  const lines = [`${topic}: ${edges.length} hyperedge${edges.length === 1 ? "" : "s"}`];
  for (const edge of edges) {
    lines.push(`${edge.id} {${edge.topics.join(", ")}}`);
  }
  return lines;
}

"""Two-weighted topic hypergraph: vertices, hyperedges, coverage, achievement.

Vertices are topics. A hyperedge connects the exact tag set of one or more
questions and carries two weights: coverage (how many attempted responses
those questions received) and achievement (the fraction of those attempts
answered correctly). A question contributes only to the edge whose topic
set equals its tag set exactly; superset or subset tagging never leaks into
another edge, so attempted responses partition across edges.
"""

from __future__ import annotations

import decimal
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import DataFormatError, InvariantError, ModelError
from .ingest import (
    IndexMaps,
    WorkingMatrices,
    build_index_maps,
    build_matrices,
    parse_qt,
    parse_sqa,
)


@dataclass(frozen=True)
class TopicVertex:
    """One vertex per distinct topic label."""

    label: str
    index: int


@dataclass(frozen=True)
class Contributor:
    """Per-question share of an edge's weights."""

    question_id: str
    attempts: int
    correct: int


@dataclass(frozen=True)
class Hyperedge:
    """An edge over a topic set with its two weights.

    ``topics`` is the sorted label tuple; arity 1 is a self-loop.
    ``coverage`` counts attempted responses, ``achievement`` is the exact
    fraction of them answered correctly.
    """

    edge_id: str
    topics: tuple[str, ...]
    coverage: int
    achievement: Fraction
    contributors: tuple[Contributor, ...]

    @property
    def arity(self) -> int:
        return len(self.topics)

    @property
    def topic_set(self) -> frozenset[str]:
        return frozenset(self.topics)

    def achievement_display(self) -> str:
        """Achievement as a 2-decimal string, rounded half-up (7/13 -> 0.54)."""
        return format_achievement(self.achievement)


@dataclass(frozen=True)
class Tdm:
    """The built model: topic vertices plus two-weighted hyperedges.

    Hyperedges are in canonical order (arity ascending, then lexicographic
    by sorted topic labels) and carry ids h1, h2, ... in that order.
    Tag sets that no student ever attempted are excluded from the graph
    (their achievement would be 0/0) and surfaced in ``zero_coverage_sets``.
    """

    vertices: tuple[TopicVertex, ...]
    hyperedges: tuple[Hyperedge, ...]
    zero_coverage_sets: tuple[tuple[str, ...], ...] = ()
    _by_id: dict[str, Hyperedge] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {e.edge_id: e for e in self.hyperedges})

    @property
    def depth(self) -> int:
        """Number of levels: one per vertex (the maximum possible arity)."""
        return len(self.vertices)

    def edge(self, edge_id: str) -> Hyperedge:
        try:
            return self._by_id[edge_id]
        except KeyError:
            raise ModelError(f"unknown edge id {edge_id!r}") from None


def format_achievement(value: Fraction) -> str:
    quantized = (
        decimal.Decimal(value.numerator) / decimal.Decimal(value.denominator)
    ).quantize(decimal.Decimal("0.01"), rounding=decimal.ROUND_HALF_UP)
    return str(quantized)


def canonical_topic_order(topic_sets: Iterable[frozenset[str]]) -> list[frozenset[str]]:
    """Sort topic sets by arity, then lexicographically by sorted labels."""
    return sorted(topic_sets, key=lambda c: (len(c), sorted(c)))


def exact_tag_match(
    question_index: int, topic_indexes: frozenset[int] | set[int], tag_matrix: np.ndarray
) -> bool:
    """True iff the question's tag set equals ``topic_indexes`` exactly.

    A question tagged with a strict superset (or subset) does not match:
    its responses belong to its own edge.
    """
    if not topic_indexes:
        raise ModelError("empty topic set")
    tagged = np.flatnonzero(tag_matrix[question_index])
    return set(tagged.tolist()) == set(topic_indexes)


def compute_cov(
    topic_indexes: frozenset[int] | set[int],
    tag_matrix: np.ndarray,
    attempt_matrix: np.ndarray,
) -> int:
    """Coverage: attempted responses over questions tagged exactly with the set."""
    total = 0
    for qi in range(tag_matrix.shape[0]):
        if exact_tag_match(qi, topic_indexes, tag_matrix):
            total += int(attempt_matrix[:, qi].sum())
    return total


def compute_achv(
    topic_indexes: frozenset[int] | set[int],
    tag_matrix: np.ndarray,
    correct_matrix: np.ndarray,
    attempt_matrix: np.ndarray,
) -> Fraction:
    """Achievement: correct / attempted over exactly-matching questions.

    Undefined (raises ModelError) when the coverage is zero.
    """
    coverage = compute_cov(topic_indexes, tag_matrix, attempt_matrix)
    if coverage == 0:
        raise ModelError("achievement undefined: topic set has zero coverage")
    correct = 0
    for qi in range(tag_matrix.shape[0]):
        if exact_tag_match(qi, topic_indexes, tag_matrix):
            correct += int(correct_matrix[:, qi].sum())
    return Fraction(correct, coverage)


def build_tdm(matrices: WorkingMatrices, maps: IndexMaps) -> Tdm:
    """Assemble the hypergraph from the working matrices.

    One vertex per topic; one hyperedge per distinct exact tag set with at
    least one attempted response. Contributor breakdowns are kept per
    question to power tooltips and audits.
    """
    vertices = tuple(TopicVertex(label, i) for label, i in maps.t_index.items())
    questions = maps.questions

    by_tag_set: dict[frozenset[str], list[int]] = {}
    for qi in range(matrices.tag_matrix.shape[0]):
        labels = frozenset(
            vertices[ti].label for ti in np.flatnonzero(matrices.tag_matrix[qi])
        )
        by_tag_set.setdefault(labels, []).append(qi)

    edges: list[Hyperedge] = []
    zero_coverage: list[tuple[str, ...]] = []
    for topic_set in canonical_topic_order(by_tag_set):
        contributors = []
        for qi in sorted(by_tag_set[topic_set], key=lambda qi: questions[qi]):
            attempts = int(matrices.attempt_matrix[:, qi].sum())
            correct = int(matrices.correct_matrix[:, qi].sum())
            if attempts:
                contributors.append(Contributor(questions[qi], attempts, correct))
        coverage = sum(c.attempts for c in contributors)
        if coverage == 0:
            zero_coverage.append(tuple(sorted(topic_set)))
            continue
        achievement = Fraction(sum(c.correct for c in contributors), coverage)
        edges.append(
            Hyperedge(
                edge_id=f"h{len(edges) + 1}",
                topics=tuple(sorted(topic_set)),
                coverage=coverage,
                achievement=achievement,
                contributors=tuple(contributors),
            )
        )

    # Every attempted response lands in exactly one edge (tag sets partition
    # the questions), so the coverages must add up to the response count.
    total_attempts = int(matrices.attempt_matrix.sum())
    total_coverage = sum(e.coverage for e in edges)
    if total_coverage != total_attempts:
        raise InvariantError(
            f"coverage sum {total_coverage} != attempted responses {total_attempts}"
        )
    return Tdm(vertices, tuple(edges), tuple(zero_coverage))


def build_model(sqa_raw: bytes | str, qt_raw: bytes | str) -> Tdm:
    """End-to-end build: parse both CSVs, index, materialize, assemble."""
    responses = parse_sqa(sqa_raw)
    tags = parse_qt(qt_raw)
    maps = build_index_maps(responses, tags)
    return build_tdm(build_matrices(responses, tags, maps), maps)


def tdm_to_json(tdm: Tdm) -> str:
    """Serialize with stable field order; identical models yield identical bytes."""
    payload = {
        "vertices": [{"label": v.label, "index": v.index} for v in tdm.vertices],
        "edges": [
            {
                "id": e.edge_id,
                "topics": list(e.topics),
                "coverage": e.coverage,
                "achievement_num": e.achievement.numerator,
                "achievement_den": e.achievement.denominator,
                "contributors": [
                    {
                        "question_id": c.question_id,
                        "attempts": c.attempts,
                        "correct": c.correct,
                    }
                    for c in e.contributors
                ],
            }
            for e in tdm.hyperedges
        ],
        "diagnostics": {
            "zero_coverage_topic_sets": [list(s) for s in tdm.zero_coverage_sets]
        },
    }
    return json.dumps(payload, indent=2) + "\n"


def tdm_from_json(text: str | bytes) -> Tdm:
    """Rehydrate a model written by tdm_to_json."""
    try:
        payload = json.loads(text)
        vertices = tuple(
            TopicVertex(v["label"], v["index"]) for v in payload["vertices"]
        )
        edges = tuple(
            Hyperedge(
                edge_id=e["id"],
                topics=tuple(e["topics"]),
                coverage=e["coverage"],
                achievement=Fraction(e["achievement_num"], e["achievement_den"]),
                contributors=tuple(
                    Contributor(c["question_id"], c["attempts"], c["correct"])
                    for c in e["contributors"]
                ),
            )
            for e in payload["edges"]
        )
        zero = tuple(
            tuple(s) for s in payload["diagnostics"]["zero_coverage_topic_sets"]
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise DataFormatError(f"invalid model JSON: {exc}") from exc
    return Tdm(vertices, edges, zero)

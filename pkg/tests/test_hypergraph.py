from __future__ import annotations

import random
from fractions import Fraction

import pytest

from topicmesh import (
    ModelError,
    build_index_maps,
    build_matrices,
    build_model,
    build_tdm,
    parse_qt,
    parse_sqa,
    tdm_from_json,
    tdm_to_json,
)
from topicmesh.hypergraph import (
    compute_achv,
    compute_cov,
    exact_tag_match,
    format_achievement,
)

from oracle import brute_force_attempt_total, brute_force_edge_table, random_dataset

SAMPLE_EDGES = {
    # frozen from the brute-force derivation over the sample fixture
    frozenset({"T1"}): (3, Fraction(2, 3)),
    frozenset({"T3"}): (6, Fraction(1)),
    frozenset({"T4"}): (12, Fraction(1, 2)),
    frozenset({"T1", "T2"}): (6, Fraction(2, 3)),
    frozenset({"T1", "T4"}): (13, Fraction(7, 13)),
    frozenset({"T2", "T6"}): (6, Fraction(0)),
    frozenset({"T4", "T5"}): (6, Fraction(1, 3)),
    frozenset({"T1", "T2", "T6"}): (3, Fraction(1)),
    frozenset({"T1", "T4", "T5"}): (5, Fraction(1, 5)),
    frozenset({"T1", "T2", "T4", "T5"}): (11, Fraction(4, 11)),
    frozenset({"T2", "T4", "T5", "T6"}): (5, Fraction(3, 5)),
}


@pytest.fixture(scope="module")
def sample_parts(sample_sqa, sample_qt):
    responses, tags = parse_sqa(sample_sqa), parse_qt(sample_qt)
    maps = build_index_maps(responses, tags)
    return build_matrices(responses, tags, maps), maps


def _indexes(maps, labels):
    return frozenset(maps.t_index[t] for t in labels)


def test_exact_tag_match(sample_parts):
    matrices, maps = sample_parts
    q9 = maps.q_index["Q9"]
    assert exact_tag_match(q9, _indexes(maps, {"T1", "T4", "T5"}), matrices.tag_matrix)
    # superset tagging must not leak into the pair edge
    assert not exact_tag_match(q9, _indexes(maps, {"T1", "T4"}), matrices.tag_matrix)
    with pytest.raises(ModelError):
        exact_tag_match(q9, frozenset(), matrices.tag_matrix)


def test_compute_cov_worked_values(sample_parts):
    matrices, maps = sample_parts
    cov = compute_cov(_indexes(maps, {"T1", "T4"}), matrices.tag_matrix, matrices.attempt_matrix)
    assert cov == 13
    assert compute_cov(_indexes(maps, {"T3"}), matrices.tag_matrix, matrices.attempt_matrix) == 6
    assert compute_cov(_indexes(maps, {"T6"}), matrices.tag_matrix, matrices.attempt_matrix) == 0


def test_compute_achv_worked_values(sample_parts):
    matrices, maps = sample_parts
    args = (matrices.tag_matrix, matrices.correct_matrix, matrices.attempt_matrix)
    assert compute_achv(_indexes(maps, {"T1", "T4"}), *args) == Fraction(7, 13)
    assert compute_achv(_indexes(maps, {"T2", "T6"}), *args) == 0
    assert compute_achv(_indexes(maps, {"T1", "T2", "T6"}), *args) == 1
    with pytest.raises(ModelError, match="zero coverage"):
        compute_achv(_indexes(maps, {"T6"}), *args)


def test_build_tdm_sample(sample_tdm):
    assert len(sample_tdm.vertices) == 6
    assert len(sample_tdm.hyperedges) == 11
    assert {e.topic_set for e in sample_tdm.hyperedges} == set(SAMPLE_EDGES)
    for edge in sample_tdm.hyperedges:
        cov, achv = SAMPLE_EDGES[edge.topic_set]
        assert edge.coverage == cov
        assert edge.achievement == achv


def test_build_tdm_contributor_breakdown(sample_tdm):
    h10 = next(e for e in sample_tdm.hyperedges if e.topic_set == {"T1", "T2", "T4", "T5"})
    assert h10.coverage == 11
    assert {(c.question_id, c.attempts) for c in h10.contributors} == {("Q10", 6), ("Q14", 5)}
    assert h10.achievement == Fraction(4, 11)


def test_canonical_ordering_and_ids(sample_tdm):
    assert [e.edge_id for e in sample_tdm.hyperedges] == [f"h{i}" for i in range(1, 12)]
    arities = [e.arity for e in sample_tdm.hyperedges]
    assert arities == sorted(arities)
    for a, b in zip(sample_tdm.hyperedges, sample_tdm.hyperedges[1:]):
        assert (a.arity, list(a.topics)) < (b.arity, list(b.topics))
    assert sample_tdm.edge("h5").topic_set == {"T1", "T4"}


def test_single_response_self_loop():
    tdm = build_model(
        "student_id,question_id,score\nS1,Q1,1\n",
        "question_id,topics\nQ1,T1\n",
    )
    assert len(tdm.hyperedges) == 1
    edge = tdm.hyperedges[0]
    assert edge.arity == 1 and edge.coverage == 1 and edge.achievement == 1


def test_zero_coverage_sets_in_diagnostics():
    tdm = build_model(
        "student_id,question_id,score\nS1,Q1,1\n",
        "question_id,topics\nQ1,T1\nQ2,T1;T2\n",
    )
    assert [e.topic_set for e in tdm.hyperedges] == [frozenset({"T1"})]
    assert tdm.zero_coverage_sets == (("T1", "T2"),)


def test_coverage_partitions_attempts(sample_tdm, sample_sqa):
    total = sum(e.coverage for e in sample_tdm.hyperedges)
    assert total == brute_force_attempt_total(sample_sqa.decode()) == 76


def test_achievement_in_unit_interval_and_integral_numerator(sample_tdm):
    for edge in sample_tdm.hyperedges:
        assert 0 <= edge.achievement <= 1
        assert (edge.achievement * edge.coverage).denominator == 1


def test_oracle_equivalence_on_random_datasets():
    rng = random.Random(42)
    for _ in range(30):
        sqa, qt = random_dataset(rng)
        tdm = build_model(sqa, qt)
        engine = {e.topic_set: (e.coverage, e.achievement) for e in tdm.hyperedges}
        assert engine == brute_force_edge_table(sqa, qt)
        assert sum(e.coverage for e in tdm.hyperedges) == brute_force_attempt_total(sqa)


def test_permutation_invariance(sample_sqa, sample_qt, sample_tdm):
    rng = random.Random(11)
    sqa_lines = sample_sqa.decode().strip().split("\n")
    qt_lines = sample_qt.decode().strip().split("\n")
    body_s, body_q = sqa_lines[1:], qt_lines[1:]
    rng.shuffle(body_s)
    rng.shuffle(body_q)
    shuffled = build_model(
        "\n".join([sqa_lines[0]] + body_s) + "\n",
        "\n".join([qt_lines[0]] + body_q) + "\n",
    )
    assert shuffled == sample_tdm


def test_adding_correct_response_moves_one_edge(sample_sqa, sample_qt, sample_tdm):
    # S2 never attempted Q5 ({T1,T4}); granting a correct answer must bump
    # exactly that edge by one attempt and not decrease its achievement.
    augmented = sample_sqa.decode() + "S2,Q5,1\n"
    after = build_model(augmented, sample_qt)
    before_edges = {e.topic_set: e for e in sample_tdm.hyperedges}
    after_edges = {e.topic_set: e for e in after.hyperedges}
    target = frozenset({"T1", "T4"})
    assert after_edges[target].coverage == before_edges[target].coverage + 1
    assert after_edges[target].achievement >= before_edges[target].achievement
    for topic_set, edge in after_edges.items():
        if topic_set != target:
            assert edge.coverage == before_edges[topic_set].coverage
            assert edge.achievement == before_edges[topic_set].achievement


def test_json_round_trip_and_stability(sample_tdm):
    text = tdm_to_json(sample_tdm)
    assert tdm_from_json(text) == sample_tdm
    assert tdm_to_json(tdm_from_json(text)) == text
    assert '"achievement_num": 7' in text and '"achievement_den": 13' in text


def test_achievement_display_rounds_half_up():
    assert format_achievement(Fraction(7, 13)) == "0.54"
    assert format_achievement(Fraction(1, 8)) == "0.13"
    assert format_achievement(Fraction(1, 200)) == "0.01"
    assert format_achievement(Fraction(1)) == "1.00"
    assert format_achievement(Fraction(0)) == "0.00"

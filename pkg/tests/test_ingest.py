from __future__ import annotations

import random

import numpy as np
import pytest

from topicmesh import (
    DataFormatError,
    IndexMaps,
    build_index_maps,
    build_matrices,
    parse_qt,
    parse_sqa,
)
from topicmesh.ingest import canonical_qt, canonical_sqa

from oracle import random_dataset


def test_parse_sqa_sample_row(sample_sqa):
    records = parse_sqa(sample_sqa)
    assert any(
        r.student_id == "S1" and r.question_id == "Q2" and r.score == 1
        for r in records
    )
    assert len(records) == 76


def test_parse_sqa_preserves_file_order():
    raw = "student_id,question_id,score\nS2,Q1,0\nS1,Q1,1\n"
    records = parse_sqa(raw)
    assert [(r.student_id, r.score) for r in records] == [("S2", 0), ("S1", 1)]


def test_parse_sqa_header_only_is_empty():
    assert parse_sqa("student_id,question_id,score\n") == []


def test_parse_sqa_non_binary_score_reports_line():
    raw = "student_id,question_id,score\nS1,Q1,1\nS1,Q2,2\n"
    with pytest.raises(DataFormatError, match="non-binary score.*at line 3"):
        parse_sqa(raw)


def test_parse_sqa_wrong_column_count():
    with pytest.raises(DataFormatError, match="3 columns.*at line 2"):
        parse_sqa("student_id,question_id,score\nS1,Q1\n")


def test_parse_sqa_duplicate_pair():
    raw = "student_id,question_id,score\nS1,Q1,1\nS1,Q1,0\n"
    with pytest.raises(DataFormatError, match="duplicate response.*at line 3"):
        parse_sqa(raw)


def test_parse_sqa_bad_header():
    with pytest.raises(DataFormatError, match="expected header"):
        parse_sqa("a,b,c\nS1,Q1,1\n")


def test_parse_sqa_tolerates_crlf_and_bom():
    raw = b"\xef\xbb\xbfstudent_id,question_id,score\r\nS1,Q1,1\r\n"
    records = parse_sqa(raw)
    assert records[0].student_id == "S1"


def test_parse_sqa_missing_trailing_newline():
    assert len(parse_sqa("student_id,question_id,score\nS1,Q1,1")) == 1


def test_parse_qt_sample_rows(sample_qt):
    records = {r.question_id: r.topics for r in parse_qt(sample_qt)}
    assert records["Q9"] == frozenset({"T1", "T4", "T5"})
    assert records["Q2"] == frozenset({"T3"})


def test_parse_qt_empty_topic_list():
    with pytest.raises(DataFormatError, match="empty topic list.*at line 2"):
        parse_qt("question_id,topics\nQ7,\n")


def test_parse_qt_duplicate_topic_in_row():
    with pytest.raises(DataFormatError, match="duplicate topic"):
        parse_qt("question_id,topics\nQ1,T1;T1\n")


def test_parse_qt_duplicate_question():
    with pytest.raises(DataFormatError, match="duplicate question"):
        parse_qt("question_id,topics\nQ1,T1\nQ1,T2\n")


def test_index_maps_sample_sizes(sample_sqa, sample_qt):
    maps = build_index_maps(parse_sqa(sample_sqa), parse_qt(sample_qt))
    assert len(maps.q_index) == 15
    assert len(maps.s_index) == 6
    assert len(maps.t_index) == 6


def test_index_maps_singleton():
    maps = build_index_maps(
        parse_sqa("student_id,question_id,score\nS1,Q1,1\n"),
        parse_qt("question_id,topics\nQ1,T1\n"),
    )
    assert maps.q_index == {"Q1": 0}
    assert maps.s_index == {"S1": 0}
    assert maps.t_index == {"T1": 0}


def test_index_maps_untagged_question_rejected():
    with pytest.raises(DataFormatError, match="untagged question"):
        build_index_maps(
            parse_sqa("student_id,question_id,score\nS1,Q99,1\n"),
            parse_qt("question_id,topics\nQ1,T1\n"),
        )


def test_index_maps_are_lexicographic_bijections(sample_sqa, sample_qt):
    maps = build_index_maps(parse_sqa(sample_sqa), parse_qt(sample_qt))
    for index in (maps.q_index, maps.s_index, maps.t_index):
        ids = list(index)
        assert ids == sorted(ids)
        assert sorted(index.values()) == list(range(len(index)))


def test_matrices_q5_attempts(sample_sqa, sample_qt):
    responses, tags = parse_sqa(sample_sqa), parse_qt(sample_qt)
    maps = build_index_maps(responses, tags)
    m = build_matrices(responses, tags, maps)
    attempted = {
        s for s, i in maps.s_index.items() if m.attempt_matrix[i, maps.q_index["Q5"]]
    }
    assert attempted == {"S1", "S4", "S5", "S6"}


def test_matrices_attempt_total_is_76(sample_sqa, sample_qt):
    # 90 cells in the 15x6 grid minus 14 not-attempted markers, counted by
    # hand and by the brute-force script before this value was frozen.
    responses, tags = parse_sqa(sample_sqa), parse_qt(sample_qt)
    maps = build_index_maps(responses, tags)
    m = build_matrices(responses, tags, maps)
    assert int(m.attempt_matrix.sum()) == 76


def test_matrices_student_without_rows_is_all_zero(sample_sqa, sample_qt):
    responses, tags = parse_sqa(sample_sqa), parse_qt(sample_qt)
    maps = build_index_maps(responses, tags)
    padded = IndexMaps(
        q_index=maps.q_index,
        s_index={**maps.s_index, "S9": len(maps.s_index)},
        t_index=maps.t_index,
    )
    m = build_matrices(responses, tags, padded)
    assert m.attempt_matrix[-1].sum() == 0
    assert m.correct_matrix[-1].sum() == 0


def test_correct_implies_attempt_on_random_data():
    rng = random.Random(7)
    for _ in range(25):
        sqa, qt = random_dataset(rng)
        responses, tags = parse_sqa(sqa), parse_qt(qt)
        maps = build_index_maps(responses, tags)
        m = build_matrices(responses, tags, maps)
        assert np.all(m.correct_matrix <= m.attempt_matrix)


def test_tag_matrix_column_sums(sample_sqa, sample_qt):
    responses, tags = parse_sqa(sample_sqa), parse_qt(sample_qt)
    maps = build_index_maps(responses, tags)
    m = build_matrices(responses, tags, maps)
    for topic, ti in maps.t_index.items():
        expected = sum(1 for t in tags if topic in t.topics)
        assert int(m.tag_matrix[:, ti].sum()) == expected
    assert np.all(m.tag_matrix.sum(axis=1) >= 1)


def test_canonical_round_trip(sample_sqa, sample_qt):
    responses, tags = parse_sqa(sample_sqa), parse_qt(sample_qt)
    sqa_text, qt_text = canonical_sqa(responses), canonical_qt(tags)
    assert sqa_text.endswith("\n") and "\r" not in sqa_text
    reparsed_r, reparsed_t = parse_sqa(sqa_text), parse_qt(qt_text)
    maps = build_index_maps(responses, tags)
    m1 = build_matrices(responses, tags, maps)
    m2 = build_matrices(reparsed_r, reparsed_t, build_index_maps(reparsed_r, reparsed_t))
    assert np.array_equal(m1.tag_matrix, m2.tag_matrix)
    assert np.array_equal(m1.correct_matrix, m2.correct_matrix)
    assert np.array_equal(m1.attempt_matrix, m2.attempt_matrix)
    # canonical form is a fixed point
    assert canonical_sqa(reparsed_r) == sqa_text
    assert canonical_qt(reparsed_t) == qt_text


def test_row_order_does_not_matter(sample_sqa, sample_qt):
    responses, tags = parse_sqa(sample_sqa), parse_qt(sample_qt)
    maps = build_index_maps(responses, tags)
    m1 = build_matrices(responses, tags, maps)

    rng = random.Random(3)
    shuffled_r = responses[:]
    shuffled_t = tags[:]
    rng.shuffle(shuffled_r)
    rng.shuffle(shuffled_t)
    maps2 = build_index_maps(shuffled_r, shuffled_t)
    assert maps2 == maps
    m2 = build_matrices(shuffled_r, shuffled_t, maps2)
    assert np.array_equal(m1.attempt_matrix, m2.attempt_matrix)
    assert np.array_equal(m1.correct_matrix, m2.correct_matrix)
    assert np.array_equal(m1.tag_matrix, m2.tag_matrix)


def test_matrices_are_read_only(sample_sqa, sample_qt):
    responses, tags = parse_sqa(sample_sqa), parse_qt(sample_qt)
    maps = build_index_maps(responses, tags)
    m = build_matrices(responses, tags, maps)
    with pytest.raises(ValueError):
        m.attempt_matrix[0, 0] = 1

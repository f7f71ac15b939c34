"""CSV ingestion: response/tag records, index maps, and working matrices.

Two input files feed the pipeline: a student-question-answer file
(``student_id,question_id,score``) and a question-topic tag file
(``question_id,topics`` with ``;``-separated topic labels). Parsing is
strict: structural problems are reported with the offending line number
instead of being papered over.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError

SQA_HEADER = ("student_id", "question_id", "score")
QT_HEADER = ("question_id", "topics")
TOPIC_SEPARATOR = ";"


@dataclass(frozen=True)
class ResponseRecord:
    """One attempted answer: (student, question, correct?)."""

    student_id: str
    question_id: str
    score: int


@dataclass(frozen=True)
class TagRecord:
    """One question together with its full topic tag set."""

    question_id: str
    topics: frozenset[str]


@dataclass(frozen=True)
class IndexMaps:
    """Bijections from question/student/topic identifiers to 0-based indices.

    Ordering is lexicographic byte order of the identifiers, so two
    differently-ordered exports of the same data index identically.
    """

    q_index: dict[str, int]
    s_index: dict[str, int]
    t_index: dict[str, int]

    @property
    def questions(self) -> list[str]:
        return list(self.q_index)

    @property
    def students(self) -> list[str]:
        return list(self.s_index)

    @property
    def topics(self) -> list[str]:
        return list(self.t_index)


@dataclass(frozen=True)
class WorkingMatrices:
    """Binary matrices the hypergraph is computed from.

    tag_matrix:     question x topic, 1 = question tagged with topic
    correct_matrix: student x question, 1 = answered correctly
    attempt_matrix: student x question, 1 = attempted

    A correct answer implies an attempt; a (student, question) pair absent
    from the response file leaves both cells 0 (absence encodes
    "not attempted").
    """

    tag_matrix: np.ndarray
    correct_matrix: np.ndarray
    attempt_matrix: np.ndarray


def _decode(raw: bytes | str) -> str:
    if isinstance(raw, bytes):
        return raw.decode("utf-8-sig")
    return raw.lstrip("﻿")


def _read_rows(text: str, header: tuple[str, ...], source: str):
    """Yield (line_number, row) for data rows after validating the header."""
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        first = next(reader)
    except StopIteration:
        raise DataFormatError(f"{source}: missing header") from None
    if tuple(first) != header:
        raise DataFormatError(
            f"{source}: expected header {','.join(header)!r}, got {','.join(first)!r}",
            line=1,
        )
    for row in reader:
        if not row:
            continue
        yield reader.line_num, row


def parse_sqa(raw: bytes | str) -> list[ResponseRecord]:
    """Parse the student-question-answer CSV into records, in file order.

    Raises DataFormatError (with line number) for a wrong column count, a
    non-binary score, or a duplicate (student, question) pair.
    """
    records: list[ResponseRecord] = []
    seen: set[tuple[str, str]] = set()
    for line, row in _read_rows(_decode(raw), SQA_HEADER, "SQA"):
        if len(row) != 3:
            raise DataFormatError(f"SQA: expected 3 columns, got {len(row)}", line=line)
        student_id, question_id, score = row
        if not student_id or not question_id:
            raise DataFormatError("SQA: empty identifier", line=line)
        if score not in ("0", "1"):
            raise DataFormatError(f"SQA: non-binary score {score!r}", line=line)
        key = (student_id, question_id)
        if key in seen:
            raise DataFormatError(f"SQA: duplicate response for {key!r}", line=line)
        seen.add(key)
        records.append(ResponseRecord(student_id, question_id, int(score)))
    return records


def parse_qt(raw: bytes | str) -> list[TagRecord]:
    """Parse the question-topic CSV; topics are ``;``-separated labels.

    Raises DataFormatError for an empty topic list, a duplicate topic within
    a row, or a question appearing twice.
    """
    records: list[TagRecord] = []
    seen_questions: set[str] = set()
    for line, row in _read_rows(_decode(raw), QT_HEADER, "QT"):
        if len(row) != 2:
            raise DataFormatError(f"QT: expected 2 columns, got {len(row)}", line=line)
        question_id, topics_field = row
        if not question_id:
            raise DataFormatError("QT: empty question_id", line=line)
        if question_id in seen_questions:
            raise DataFormatError(f"QT: duplicate question {question_id!r}", line=line)
        seen_questions.add(question_id)
        if not topics_field:
            raise DataFormatError(f"QT: empty topic list for {question_id!r}", line=line)
        labels = topics_field.split(TOPIC_SEPARATOR)
        if any(not label for label in labels):
            raise DataFormatError(f"QT: empty topic label for {question_id!r}", line=line)
        if len(set(labels)) != len(labels):
            raise DataFormatError(f"QT: duplicate topic for {question_id!r}", line=line)
        records.append(TagRecord(question_id, frozenset(labels)))
    return records


def build_index_maps(
    responses: list[ResponseRecord], tags: list[TagRecord]
) -> IndexMaps:
    """Assign contiguous indices to every question, student, and topic.

    Every question referenced in the response file must carry tags;
    tagged-but-unattempted questions are retained.
    """
    tagged = {t.question_id for t in tags}
    for record in responses:
        if record.question_id not in tagged:
            raise DataFormatError(f"untagged question {record.question_id!r}")
    questions = sorted(tagged)
    students = sorted({r.student_id for r in responses})
    topics = sorted(set().union(*(t.topics for t in tags)) if tags else set())
    return IndexMaps(
        q_index={q: i for i, q in enumerate(questions)},
        s_index={s: i for i, s in enumerate(students)},
        t_index={t: i for i, t in enumerate(topics)},
    )


def build_matrices(
    responses: list[ResponseRecord], tags: list[TagRecord], maps: IndexMaps
) -> WorkingMatrices:
    """Materialize the tag/correct/attempt matrices from parsed records."""
    tag_matrix = np.zeros((len(maps.q_index), len(maps.t_index)), dtype=np.int8)
    for record in tags:
        qi = maps.q_index[record.question_id]
        for topic in record.topics:
            tag_matrix[qi, maps.t_index[topic]] = 1

    shape = (len(maps.s_index), len(maps.q_index))
    correct_matrix = np.zeros(shape, dtype=np.int8)
    attempt_matrix = np.zeros(shape, dtype=np.int8)
    for record in responses:
        si = maps.s_index[record.student_id]
        qi = maps.q_index[record.question_id]
        attempt_matrix[si, qi] = 1
        correct_matrix[si, qi] = record.score

    for matrix in (tag_matrix, correct_matrix, attempt_matrix):
        matrix.setflags(write=False)
    return WorkingMatrices(tag_matrix, correct_matrix, attempt_matrix)


def _write_csv(header: tuple[str, ...], rows: list[tuple[str, ...]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def canonical_sqa(responses: list[ResponseRecord]) -> str:
    """Canonical response CSV: rows sorted by (student, question), LF endings."""
    ordered = sorted(responses, key=lambda r: (r.student_id, r.question_id))
    return _write_csv(
        SQA_HEADER, [(r.student_id, r.question_id, str(r.score)) for r in ordered]
    )


def canonical_qt(tags: list[TagRecord]) -> str:
    """Canonical tag CSV: rows sorted by question, topics sorted within a row."""
    ordered = sorted(tags, key=lambda t: t.question_id)
    return _write_csv(
        QT_HEADER,
        [(t.question_id, TOPIC_SEPARATOR.join(sorted(t.topics))) for t in ordered],
    )

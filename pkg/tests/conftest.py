from __future__ import annotations

from pathlib import Path

import pytest

from topicmesh import build_model, partition_levels

DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def sample_sqa() -> bytes:
    return (DATA / "sample_sqa.csv").read_bytes()


@pytest.fixture(scope="session")
def sample_qt() -> bytes:
    return (DATA / "sample_qt.csv").read_bytes()


@pytest.fixture(scope="session")
def sample_tdm(sample_sqa, sample_qt):
    return build_model(sample_sqa, sample_qt)


@pytest.fixture(scope="session")
def sample_partition(sample_tdm):
    return partition_levels(sample_tdm)

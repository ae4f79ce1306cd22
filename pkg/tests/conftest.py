from __future__ import annotations

from pathlib import Path

import pytest

from groupline import corpus

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def space_excerpt() -> corpus.Timeline:
    return corpus.parse_timeline(FIXTURES / "space_excerpt.jsonl")


@pytest.fixture(scope="session")
def space_excerpt_groups(space_excerpt) -> corpus.Partition:
    return corpus.read_partition_csv(
        FIXTURES / "space_excerpt_groups.csv", timeline_id=space_excerpt.timeline_id
    )

from __future__ import annotations

import random

import pytest

from prefmap.core import Election


@pytest.fixture
def worked_example() -> Election:
    """Six voters over candidates a, b, c: three report a>b>c, one b>a>c,
    two c>a>b."""
    return Election(
        candidates=("a", "b", "c"),
        votes=((0, 1, 2), (0, 1, 2), (0, 1, 2), (1, 0, 2), (2, 0, 1), (2, 0, 1)),
    )


def make_random_election(seed: int, m: int, n: int) -> Election:
    rng = random.Random(seed)
    votes = []
    for _ in range(n):
        v = list(range(m))
        rng.shuffle(v)
        votes.append(tuple(v))
    return Election(candidates=tuple(range(m)), votes=tuple(votes))

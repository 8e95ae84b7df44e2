from __future__ import annotations

import cmath
import random

import pytest

from webcat.qscalar import QContext


def generic_q_samples(n: int = 5, seed: int = 7) -> list[complex]:
    """Random q away from roots of unity and from zero."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        r = rng.uniform(0.6, 1.6)
        th = rng.uniform(0.1, 3.0)
        if abs(r - 1) < 0.05:
            continue
        out.append(cmath.rect(r, th))
    return out


@pytest.fixture
def generic():
    return QContext.generic()

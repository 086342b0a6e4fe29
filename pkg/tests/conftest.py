from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qlimits.series import QSeries


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xE7A)


def random_series(
    rng: random.Random,
    val_range: tuple[int, int] = (-6, 4),
    length: int = 32,
    coeff_bound: int = 99,
    zero_weight: float = 0.25,
) -> QSeries:
    val = rng.randint(*val_range)
    coeffs = tuple(
        0 if rng.random() < zero_weight else rng.randint(-coeff_bound, coeff_bound)
        for _ in range(length)
    )
    return QSeries(val, coeffs)

from pathlib import Path

import numpy as np
import pytest

REPO = Path(__file__).resolve().parents[1]
DATA = REPO / "data"
FIXTURE = DATA / "fixture"
WEATHER_2022 = DATA / "weather" / "sample_2022.csv"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE


@pytest.fixture(scope="session")
def sample_weather_path() -> Path:
    return WEATHER_2022


def random_grid(rng: np.random.Generator, max_side: int = 64) -> np.ndarray:
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    density = rng.uniform(0.05, 0.95)
    return rng.random((h, w)) < density

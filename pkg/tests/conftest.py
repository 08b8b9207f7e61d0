"""测试公共夹具"""

import os
import sys

import numpy as np
import pytest

# 与 src/main.py 相同：让 `from src.x import` 可用
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.geometry import Ball, Parallel, Polytope  # noqa: E402
from src.settings import Settings  # noqa: E402

UNIT_SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]
UNIT_CUBE = [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]


@pytest.fixture
def unit_square() -> Polytope:
    return Polytope(UNIT_SQUARE)


@pytest.fixture
def unit_cube() -> Polytope:
    return Polytope(UNIT_CUBE)


@pytest.fixture
def unit_disk() -> Ball:
    return Ball([0.0, 0.0], 1.0)


@pytest.fixture
def smooth_square(unit_square) -> Parallel:
    return Parallel(unit_square, 1.0)


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture
def clean_env(monkeypatch):
    for key in ("HARNESS_CONFIG", "HARNESS_WORKERS", "HARNESS_OUTPUT_DIR"):
        monkeypatch.delenv(key, raising=False)
    return monkeypatch


def random_polygon(seed: int, count: int = 8) -> Polytope:
    """单位圆附近的随机凸多边形"""
    rng = np.random.default_rng(seed)
    theta = np.sort(rng.uniform(0, 2 * np.pi, count))
    radius = rng.uniform(0.6, 1.0, count)
    return Polytope(np.column_stack([radius * np.cos(theta), radius * np.sin(theta)]))

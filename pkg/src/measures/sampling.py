"""Shell sampler - 平行壳层 K_ρ∖K 上的拒绝采样与局部平行体积测度 μ_{K,ρ}"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, TypeVar

import numpy as np

from ..errors import MeasureError
from ..geometry.bodies import ConvexBody
from ..geometry.projection import distances_and_directions
from ..seeding import make_generator, validate_seed
from .discrete import DiscreteMeasure

logger = logging.getLogger("Sampler")

MIN_SAMPLES = 1000
BOX_INFLATION = 1e-9

T = TypeVar("T")

Box = Tuple[np.ndarray, np.ndarray]


def shell_box(*bodies: ConvexBody, rho: float) -> Box:
    """包含所有 K_ρ 的轴对齐盒，向外扩张 1e-9"""
    boxes = [b.bounding_box(pad=rho + BOX_INFLATION) for b in bodies]
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    return lo, hi


def box_volume(box: Box) -> float:
    return float(np.prod(box[1] - box[0]))


def run_shards(task: Callable[[int], T], shards: int, workers: int) -> List[T]:
    """按分片编号顺序返回结果，与工作线程数无关"""
    if workers <= 1 or shards <= 1:
        return [task(k) for k in range(shards)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, range(shards)))


def shard_sizes(samples: int, shard_size: int) -> List[int]:
    full, rest = divmod(samples, shard_size)
    return [shard_size] * full + ([rest] if rest else [])


def draw_box_points(box: Box, seed: int, shard: int, count: int) -> np.ndarray:
    rng = make_generator(seed, shard)
    lo, hi = box
    return lo + (hi - lo) * rng.random((count, len(lo)))


@dataclass(frozen=True)
class ShellSampler:
    """
    μ_{K,ρ} 的 Monte Carlo 采样器

    box 缺省为 K_ρ 的包围盒；两个凸体共用同一个 box 与 seed 时样本完全相同。
    """

    body: ConvexBody
    rho: float
    seed: int
    samples: int
    box: Optional[Box] = None
    shard_size: int = 65536
    workers: int = 1

    def __post_init__(self):
        validate_seed(self.seed)
        if not self.rho > 0:
            raise MeasureError(f"ρ 必须为正，收到 {self.rho}")
        if self.samples < MIN_SAMPLES:
            raise MeasureError(f"样本数至少为 {MIN_SAMPLES}，收到 {self.samples}")
        if self.shard_size < 1:
            raise MeasureError("分片大小必须 >= 1")

    @property
    def sampling_box(self) -> Box:
        if self.box is not None:
            return self.box
        return shell_box(self.body, rho=self.rho)

    def _shard(self, shard: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
        points = draw_box_points(self.sampling_box, self.seed, shard, count)
        p, d, u = distances_and_directions(self.body, points)
        accepted = (d > 0) & (d <= self.rho)
        return p[accepted], u[accepted]

    def sample(self) -> Tuple[DiscreteMeasure, float]:
        sizes = shard_sizes(self.samples, self.shard_size)
        parts = run_shards(lambda k: self._shard(k, sizes[k]), len(sizes), self.workers)
        x = np.vstack([p for p, _ in parts])
        u = np.vstack([q for _, q in parts])
        if len(x) == 0:
            raise MeasureError("没有样本落入平行壳层")

        vol = box_volume(self.sampling_box)
        weight = vol / self.samples
        ratio = len(x) / self.samples
        stat_error = 3 * vol * np.sqrt(ratio * (1 - ratio) / self.samples)
        measure = DiscreteMeasure(x, u, np.full(len(x), weight), rho=self.rho)
        logger.debug(f"ρ={self.rho:g}: 接受 {len(x)}/{self.samples}，总质量 {measure.total_mass:.6g} ± {stat_error:.2g}")
        return measure, float(stat_error)


def mc_local_parallel_measure(sampler: ShellSampler) -> Tuple[DiscreteMeasure, float]:
    """
    μ_{K,ρ} = f_ρ 对 H^n⌊(K_ρ∖K) 的推前，f_ρ(x) = (p(K,x), u(K,x))

    Returns:
        (measure, stat_error)：stat_error 为总质量的 3σ 二项误差界
    """
    return sampler.sample()

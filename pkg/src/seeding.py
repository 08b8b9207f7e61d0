"""随机数生成 - 计数型生成器 Philox，按 (seed, shard) 派生子流"""

import numpy as np

from .errors import InvalidSeedError

_MAX_SEED = 2 ** 64 - 1


def validate_seed(seed) -> int:
    """种子必须是 [0, 2^64) 内的整数"""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InvalidSeedError(f"种子必须是整数，收到 {seed!r}")
    if not 0 <= int(seed) <= _MAX_SEED:
        raise InvalidSeedError(f"种子超出 64 位范围: {seed}")
    return int(seed)


def make_generator(seed, *keys: int) -> np.random.Generator:
    """
    构造与工作线程数无关的确定性生成器

    Args:
        seed: 64 位种子
        keys: 附加的流标识（分片编号、用途编号等）

    Returns:
        np.random.Generator(Philox)
    """
    entropy = [validate_seed(seed), *[int(k) for k in keys]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

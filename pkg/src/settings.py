"""Settings - 加载 YAML 配置并应用环境变量覆盖"""

import logging
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Optional

import yaml

from .errors import ConfigError

logger = logging.getLogger("Settings")

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_PATH = "config/harness.yaml"


@dataclass(frozen=True)
class GeometrySettings:
    boundary_tol: float = 1e-9
    hausdorff_max_evaluations: int = 2_000_000
    hausdorff_tol: float = 1e-4


@dataclass(frozen=True)
class SamplingSettings:
    shard_size: int = 65536
    workers: int = 1
    samples: int = 200_000


@dataclass(frozen=True)
class FlatSettings:
    oracle_cap: int = 400
    tol: float = 1e-9
    flow_max_rounds: int = 60
    flow_neighbors: int = 8
    coarsen_h: float = 0.02


@dataclass(frozen=True)
class QuadratureSettings:
    gauss_order: int = 8
    level: int = 3
    tol: float = 1e-8


@dataclass(frozen=True)
class ProbeSettings:
    samples: int = 10_000
    fd_step: float = 1e-5
    boundary_margin: float = 1e-4


@dataclass(frozen=True)
class SweepSettings:
    slope_min: float = 0.45
    stability_factor: float = 2.0
    mesh_h: float = 0.02
    output_dir: str = "output"


@dataclass(frozen=True)
class Settings:
    geometry: GeometrySettings = field(default_factory=GeometrySettings)
    sampling: SamplingSettings = field(default_factory=SamplingSettings)
    flat: FlatSettings = field(default_factory=FlatSettings)
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    probes: ProbeSettings = field(default_factory=ProbeSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "Settings":
        """
        由 YAML 字典构造配置，缺省项使用默认值

        Args:
            raw: yaml.safe_load 的结果

        Returns:
            Settings 实例
        """
        sections = {}
        for f in fields(cls):
            section_cls = f.default_factory
            values = raw.get(f.name) or {}
            if not isinstance(values, dict):
                raise ConfigError(f"配置节 '{f.name}' 必须是映射")
            known = {sf.name: sf.type for sf in fields(section_cls)}
            unknown = set(values) - set(known)
            if unknown:
                raise ConfigError(f"配置节 '{f.name}' 含未知键: {sorted(unknown)}")
            coerced = {}
            for key, value in values.items():
                default = getattr(section_cls(), key)
                try:
                    coerced[key] = type(default)(value)
                except (TypeError, ValueError) as e:
                    raise ConfigError(f"{f.name}.{key} = {value!r} 无法解析: {e}") from e
            sections[f.name] = section_cls(**coerced)
        return cls(**sections)


def resolve_path(path: str) -> str:
    """相对路径按项目根目录解析"""
    if os.path.isabs(path):
        return path
    return os.path.join(ROOT_DIR, path)


def load_settings(config_path: Optional[str] = None) -> Settings:
    """
    加载配置文件

    优先级：参数 > 环境变量 HARNESS_CONFIG > config/harness.yaml。
    文件不存在时使用默认配置。HARNESS_WORKERS / HARNESS_OUTPUT_DIR 覆盖对应字段。

    Args:
        config_path: 配置文件路径

    Returns:
        Settings 实例
    """
    config_path = config_path or os.environ.get("HARNESS_CONFIG") or DEFAULT_CONFIG_PATH
    full_path = resolve_path(config_path)

    if not os.path.exists(full_path):
        logger.warning(f"配置文件不存在: {full_path}，使用默认配置")
        settings = Settings()
    else:
        with open(full_path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"配置文件顶层必须是映射: {full_path}")
        settings = Settings.from_dict(raw)

    return _apply_env_overrides(settings)


def _apply_env_overrides(settings: Settings) -> Settings:
    """应用环境变量覆盖"""
    workers = os.environ.get("HARNESS_WORKERS", "")
    if workers:
        try:
            n_workers = int(workers)
        except ValueError as e:
            raise ConfigError(f"HARNESS_WORKERS 必须是整数: {workers!r}") from e
        if n_workers < 1:
            raise ConfigError("HARNESS_WORKERS 必须 >= 1")
        settings = replace(settings, sampling=replace(settings.sampling, workers=n_workers))

    output_dir = os.environ.get("HARNESS_OUTPUT_DIR", "")
    if output_dir:
        settings = replace(settings, sweep=replace(settings.sweep, output_dir=output_dir))

    return settings

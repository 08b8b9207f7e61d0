"""凸体描述文件（JSON）的读写"""

import json
from typing import Any, Dict

from ..errors import ConfigError, GeometryError
from .bodies import Ball, ConvexBody, Parallel, Polytope


def body_from_dict(data: Dict[str, Any]) -> ConvexBody:
    """
    由描述字典构造凸体

    格式：{"type": "polytope", "vertices": [...]} | {"type": "ball", "center": [...], "radius": r}
    | {"type": "parallel", "inner": {...}, "rho": r}；可选 "dim" 用于校验。
    """
    if not isinstance(data, dict):
        raise ConfigError("凸体描述必须是 JSON 对象")
    kind = data.get("type")
    try:
        if kind == "polytope":
            body = Polytope(data["vertices"])
        elif kind == "ball":
            body = Ball(data["center"], float(data["radius"]))
        elif kind == "parallel":
            body = Parallel(body_from_dict(data["inner"]), float(data["rho"]))
        else:
            raise ConfigError(f"未知凸体类型: {kind!r}")
    except KeyError as e:
        raise ConfigError(f"凸体描述缺少字段 {e}") from e

    if "dim" in data and int(data["dim"]) != body.dim:
        raise GeometryError(f"声明维度 {data['dim']} 与数据维度 {body.dim} 不一致")
    return body


def load_body(path: str) -> ConvexBody:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"无法解析凸体文件 {path}: {e}") from e
    return body_from_dict(data)


def dump_body(body: ConvexBody, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(body.to_dict(), f, indent=2)

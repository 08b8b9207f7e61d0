"""CSV Report - 扫描结果 CSV 与 JSON 附带文件

CSV 中的浮点数用 repr 写出，不含时间戳，同一配置与种子的两次运行逐字节相同。
"""

import csv
import json
import logging
import os
import platform
from typing import Dict, List, Tuple

import numpy as np
import scipy

from ..errors import ConfigError
from ..settings import resolve_path

logger = logging.getLogger("Report")


class CsvReport:
    """写出 <name>.csv 与 <name>.json"""

    def __init__(self, output_dir: str = "output"):
        """
        Args:
            output_dir: 输出目录，相对路径按项目根目录解析
        """
        self.output_dir = resolve_path(output_dir)
        os.makedirs(self.output_dir, exist_ok=True)

    def paths(self, name: str) -> Tuple[str, str]:
        base = os.path.join(self.output_dir, name)
        return f"{base}.csv", f"{base}.json"

    def write(self, report) -> Tuple[str, str]:
        """
        Args:
            report: SweepReport

        Returns:
            (csv 路径, json 路径)
        """
        csv_path, json_path = self.paths(report.config.name)
        columns = report.columns
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in report.rows:
                writer.writerow([repr(float(row[c])) for c in columns])

        sidecar = {
            "config": report.config.to_dict(),
            "seed": report.config.seed,
            "dim": report.dim,
            "columns": columns,
            "partial": report.partial,
            "passed": report.passed,
            "fits": {k: v.to_dict() for k, v in sorted(report.fits.items())},
            "gates": [g.to_dict() for g in report.gates],
            "environment": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "platform": platform.platform(),
            },
        }
        with open(json_path, "w", encoding="utf-8") as f:
            json.dump(sidecar, f, ensure_ascii=False, indent=2, sort_keys=True)

        logger.info(f"报告已保存: {csv_path}")
        return csv_path, json_path


def read_report_csv(path: str) -> Tuple[List[str], Dict[str, np.ndarray]]:
    """
    读回报告 CSV

    Returns:
        (列名, {列名: 数值数组})

    Raises:
        ConfigError: 文件为空或含非数值
    """
    with open(resolve_path(path), "r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ConfigError(f"报告文件为空: {path}")
    header, body = rows[0], rows[1:]
    try:
        data = np.array([[float(v) for v in row] for row in body], dtype=float).reshape(len(body), len(header))
    except ValueError as e:
        raise ConfigError(f"报告 {path} 含非数值: {e}") from e
    return header, {name: data[:, k] for k, name in enumerate(header)}

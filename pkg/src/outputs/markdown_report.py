"""Markdown Report Generator - 生成扫描结果的 Markdown 摘要"""

import logging
import os
from datetime import datetime
from typing import List, Optional

from ..settings import resolve_path

logger = logging.getLogger("Report")


class MarkdownReport:
    """生成 Markdown 格式的扫描摘要"""

    def __init__(self, output_dir: str = "output"):
        """
        初始化摘要生成器

        Args:
            output_dir: 输出目录
        """
        self.output_dir = resolve_path(output_dir)
        os.makedirs(self.output_dir, exist_ok=True)

    def generate(self, report, date: Optional[datetime] = None) -> str:
        """
        生成摘要并保存

        Args:
            report: SweepReport
            date: 生成时间，默认现在

        Returns:
            生成的文件路径
        """
        if date is None:
            date = datetime.now()

        filepath = os.path.join(self.output_dir, f"{report.config.name}.md")
        content = self._build_content(report, date.strftime("%Y-%m-%d %H:%M:%S"))

        with open(filepath, "w", encoding="utf-8") as f:
            f.write(content)

        logger.info(f"摘要已保存: {filepath}")
        return filepath

    def _build_content(self, report, date_str: str) -> str:
        cfg = report.config
        status = "通过" if report.passed else ("部分完成" if report.partial else "未通过")
        lines = [
            f"# 扫描 {cfg.name}",
            "",
            f"**场景**: {cfg.scenario} | **基准体**: `{cfg.base}` | **维度**: {report.dim} | **结论**: {status}",
            "",
            f"δ = {', '.join(f'{d:g}' for d in cfg.deltas)}；样本数 {cfg.samples}，粗化网格 {cfg.coarsen_h:g}，种子 {cfg.seed}",
            "",
        ]

        lines.extend(self._format_rows(report))
        lines.extend(self._format_fits(report))
        lines.extend(self._format_gates(report))

        lines.extend([
            "---",
            "",
            "*斜率高于 1/2（d_bL）或 1/(2n+1)（normal cycle）与上界形式的结论并不矛盾：扫描只检验比值有界。*",
            "",
            f"*生成时间: {date_str}*",
        ])
        return "\n".join(lines)

    def _format_rows(self, report) -> List[str]:
        if not report.rows:
            return ["暂无完成的行。", ""]
        keys = ["delta", "d_h"] + [k for k in report.columns if k.startswith("ratio_")] + ["tv_area", "dbl_area"]
        lines = [
            "## 逐行结果",
            "",
            "| " + " | ".join(keys) + " |",
            "|" + "---|" * len(keys),
        ]
        for row in report.rows:
            lines.append("| " + " | ".join(f"{row[k]:.4g}" for k in keys) + " |")
        lines.append("")
        return lines

    def _format_fits(self, report) -> List[str]:
        if not report.fits:
            return []
        lines = [
            "## 对数-对数拟合",
            "",
            "| 列 | 斜率 | 截距 | 最大残差 |",
            "|---|---|---|---|",
        ]
        for name, fit in sorted(report.fits.items()):
            lines.append(f"| {name} | {fit.slope:.4f} | {fit.intercept:.4f} | {fit.max_residual:.2g} |")
        lines.append("")
        return lines

    def _format_gates(self, report) -> List[str]:
        lines = ["## 门限", ""]
        if not report.gates:
            lines.append("未判定。")
        for gate in report.gates:
            mark = "✅" if gate.passed else "❌"
            lines.append(f"- {mark} `{gate.name}`: {gate.detail}")
        lines.append("")
        return lines

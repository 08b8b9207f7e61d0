from .csv_report import CsvReport, read_report_csv
from .markdown_report import MarkdownReport


class ReportWriter:
    """CSV、JSON 附带文件与 Markdown 摘要一并写出"""

    def __init__(self, output_dir: str = "output"):
        self.csv = CsvReport(output_dir)
        self.markdown = MarkdownReport(output_dir)

    def write(self, report) -> dict:
        csv_path, json_path = self.csv.write(report)
        md_path = self.markdown.generate(report)
        return {"csv": csv_path, "json": json_path, "markdown": md_path}


__all__ = ["CsvReport", "MarkdownReport", "ReportWriter", "read_report_csv"]

"""
Report documents
Every command produces one Report: a list of titled tables plus key/value
facts. It renders as delimited text for people and as JSON for tools.
"""
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field

from .core_model import ProbabilityMeasure, QView, Rv
from .rationals import ExtendedRational, format_decimal, format_extended, format_rational

Cell = Union[str, int, bool, None]


class ReportSection(BaseModel):
    title: str
    columns: List[str] = Field(default_factory=list)
    rows: List[List[Cell]] = Field(default_factory=list)
    facts: Dict[str, Cell] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)

    def add_row(self, *cells: Any) -> "ReportSection":
        if self.columns and len(cells) != len(self.columns):
            raise ValueError(f"row has {len(cells)} cells, table '{self.title}' has {len(self.columns)} columns")
        self.rows.append([cell(c) for c in cells])
        return self

    def fact(self, key: str, value: Any) -> "ReportSection":
        self.facts[key] = cell(value)
        return self


class Report(BaseModel):
    command: str
    scenario: Optional[str] = None
    verdict: str = "ok"
    exit_code: int = 0
    sections: List[ReportSection] = Field(default_factory=list)

    def section(self, title: str, columns: Sequence[str] = ()) -> ReportSection:
        section = ReportSection(title=title, columns=list(columns))
        self.sections.append(section)
        return section

    def fail(self, verdict: str) -> "Report":
        """Mark a mathematical verdict failure (exit code 2)"""
        self.verdict = verdict
        self.exit_code = 2
        return self


def cell(value: Any) -> Cell:
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, ExtendedRational):
        return format_extended(value)
    if isinstance(value, (Rv, QView, ProbabilityMeasure)):
        return str(value)
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(str(cell(v)) for v in value) + ")"
    return str(value)


def decimal_cell(value: Union[Fraction, ExtendedRational]) -> str:
    if isinstance(value, ExtendedRational):
        if not value.is_finite:
            return format_extended(value)
        value = value.to_fraction()
    return format_decimal(value)


def _text(value: Cell) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


def render_table(report: Report) -> str:
    lines = [f"# {report.command}" + (f" ({report.scenario})" if report.scenario else "")]
    for section in report.sections:
        lines.append("")
        lines.append(f"## {section.title}")
        for key, value in section.facts.items():
            lines.append(f"{key}: {_text(value)}")
        if section.columns:
            table = [section.columns] + [[_text(c) for c in row] for row in section.rows]
            widths = [max(len(row[i]) for row in table) for i in range(len(section.columns))]
            for k, row in enumerate(table):
                lines.append(" | ".join(text.ljust(width) for text, width in zip(row, widths)).rstrip())
                if k == 0:
                    lines.append("-+-".join("-" * width for width in widths))
        for note in section.notes:
            lines.append(f"note: {note}")
    lines.append("")
    lines.append(f"verdict: {report.verdict} (exit {report.exit_code})")
    return "\n".join(lines) + "\n"


def render_machine(report: Report) -> str:
    return report.model_dump_json(indent=2) + "\n"


RENDERERS = {
    "table": render_table,
    "machine": render_machine,
}

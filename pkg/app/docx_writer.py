import json
import re
from io import BytesIO
from typing import BinaryIO, List, Sequence, Union

from docx import Document
from docx.shared import Pt, RGBColor

from app.models import ExperimentReport

# ---------------------------------------------------
# Style Helpers
# ---------------------------------------------------


def add_heading(doc, text):
    paragraph = doc.add_paragraph()
    run = paragraph.add_run(text)
    run.bold = True
    run.underline = True
    run.font.color.rgb = RGBColor(0, 0, 255)
    run.font.size = Pt(14)


def add_subheading(doc, text):
    paragraph = doc.add_paragraph()
    run = paragraph.add_run(text)
    run.bold = True
    run.font.size = Pt(12)


def add_paragraph(doc, text):
    paragraph = doc.add_paragraph()
    cursor = 0
    for match in re.finditer(r"\*\*(.+?)\*\*", text):
        start, end = match.span()
        paragraph.add_run(text[cursor:start])
        bold_run = paragraph.add_run(match.group(1))
        bold_run.bold = True
        cursor = end
    paragraph.add_run(text[cursor:])


def add_code_block(doc, code_lines):
    para = doc.add_paragraph()
    run = para.add_run("\n".join(code_lines))
    run.font.name = "Courier New"
    run.font.size = Pt(10)


def add_markdown_table(doc, lines):
    headers = [cell.strip(" *") for cell in lines[0].split("|") if cell.strip()]
    rows = [[cell.strip() for cell in row.split("|") if cell.strip()] for row in lines[2:]]
    table = doc.add_table(rows=1, cols=len(headers))
    table.style = "Table Grid"
    hdr_cells = table.rows[0].cells
    for i, h in enumerate(headers):
        hdr_cells[i].text = h
    for row in rows:
        row_cells = table.add_row().cells
        for i, cell in enumerate(row):
            row_cells[i].text = cell


def _statistics_table(report: ExperimentReport) -> List[str]:
    lines = ["| **Statistic** | **Value** |", "|---|---|"]
    for key, value in sorted(report.statistics.items()):
        shown = json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else str(value)
        lines.append(f"| {key} | {shown} |")
    return lines


# ----------------------------------------
# Public API
# ----------------------------------------


def create_report_docx(reports: Sequence[ExperimentReport], file_obj: Union[BytesIO, BinaryIO, str]):
    """Writes experiment reports to a .docx file object or path."""
    doc = Document()
    doc.add_heading("EXPERIMENT REPORT", level=1)
    for k, report in enumerate(reports, start=1):
        add_heading(doc, f"{k}. {report.experiment}")
        add_paragraph(doc, f"**Parameters:** {json.dumps(report.parameters, sort_keys=True)}")
        add_paragraph(doc, f"**Expectation:** {report.expectation}")
        add_paragraph(doc, f"**Result:** {'PASS' if report.passed else 'FAIL'}")
        if report.runtime_seconds is not None:
            add_paragraph(doc, f"**Runtime:** {report.runtime_seconds:.3f}s")
        add_subheading(doc, f"{k}.1 Statistics")
        add_markdown_table(doc, _statistics_table(report))
        add_subheading(doc, f"{k}.2 Notes")
        for note in report.notes:
            add_paragraph(doc, note)
        add_subheading(doc, f"{k}.3 Raw JSON")
        add_code_block(doc, report.model_dump_json(indent=2, exclude_none=True).splitlines())
    doc.save(file_obj)

"""Module for PDF certificates of allocations, built with ReportLab platypus.

ReportLab is an optional dependency: install it with ``pip install fairino[pdf]``.
"""

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Union

from .model import Instance
from .type_definitions import FairnessReport, PartialAllocation


if TYPE_CHECKING:
    from reportlab.lib.styles import StyleSheet1


logger = logging.getLogger(__name__)

BASE_FONT_SIZE = 10
BASE_LINE_HEIGHT = 1.5
PAGE_MARGIN_MM = 20
INSTALL_HINT = "PDF reports need ReportLab: `pip install fairino[pdf]`."


def _require_reportlab() -> None:
    try:
        import reportlab  # noqa: F401
    except ImportError as exc:
        raise ImportError(INSTALL_HINT) from exc


def get_report_stylesheet(font_size: int = BASE_FONT_SIZE, line_height: float = BASE_LINE_HEIGHT) -> "StyleSheet1":
    """Get the stylesheet of the report: a body style, two headings and a style for table cells.

    :param font_size: The base font size.
    :param line_height: The base line height.
    :return: A ReportLab stylesheet object.
    """
    from reportlab.lib import colors
    from reportlab.lib.fonts import tt2ps
    from reportlab.lib.styles import ParagraphStyle, StyleSheet1
    from reportlab.rl_config import canvas_basefontname

    stylesheet = StyleSheet1()
    bold = tt2ps(canvas_basefontname, 1, 0)

    stylesheet.add(
        ParagraphStyle(name="normal", fontName=canvas_basefontname, fontSize=font_size, leading=font_size * line_height)
    )
    for name, size, leading in (("heading1", 18, 22), ("heading2", 13, 17)):
        stylesheet.add(
            ParagraphStyle(name=name, parent=stylesheet["normal"], fontName=bold, fontSize=size, leading=leading),
            alias=f"{name[0]}{name[-1]}",
        )
    stylesheet.add(ParagraphStyle(name="cell", parent=stylesheet["normal"], fontSize=font_size - 1, leading=12))
    for name, color in (("holds", "#1b7a32"), ("fails", "#b00020")):
        stylesheet.add(
            ParagraphStyle(name=name, parent=stylesheet["normal"], fontName=bold, textColor=colors.HexColor(color))
        )
    return stylesheet


def _bundle_rows(inst: Instance, allocation: PartialAllocation) -> List[List[str]]:
    rows = [["Agent", "Frozen goods", "Completed with", "Own value"]]
    for agent, bundle in enumerate(allocation.sorted_bundles()):
        frozen = [inst.goods[good] for good in bundle if inst.frozen[good] == agent]
        added = [inst.goods[good] for good in bundle if inst.frozen[good] is None]
        own = str(inst.value_of(agent, bundle))
        rows.append([inst.agent_name(agent), ", ".join(frozen) or "-", ", ".join(added) or "-", own])
    return rows


def build_story(inst: Instance, allocation: PartialAllocation, reports: Dict[str, FairnessReport]) -> List[Any]:
    """The flowables of a report: the instance summary, the bundle table and one section per property.

    :param inst: The instance.
    :param allocation: A complete allocation of the instance.
    :param reports: Property label to checker verdict.
    :return: List of ReportLab flowables.
    """
    _require_reportlab()
    from reportlab.lib import colors
    from reportlab.lib.units import mm
    from reportlab.platypus import Paragraph, Spacer, Table, TableStyle

    styles = get_report_stylesheet()
    story: List[Any] = [
        Paragraph("Allocation certificate", styles["h1"]),
        Paragraph(
            f"{inst.n_agents} agents, {inst.m} goods, {inst.valuation_class} valuations, "
            f"{inst.m - len(inst.unallocated())} goods frozen.",
            styles["normal"],
        ),
        Spacer(1, 6 * mm),
    ]

    cells = [[Paragraph(cell, styles["cell"]) for cell in row] for row in _bundle_rows(inst, allocation)]
    table = Table(cells, repeatRows=1, hAlign="LEFT")
    table.setStyle(
        TableStyle(
            [
                ("BACKGROUND", (0, 0), (-1, 0), colors.lightgrey),
                ("GRID", (0, 0), (-1, -1), 0.5, colors.grey),
                ("VALIGN", (0, 0), (-1, -1), "TOP"),
            ]
        )
    )
    story += [table, Spacer(1, 6 * mm), Paragraph("Properties", styles["h2"])]

    for label, report in reports.items():
        verdict = "holds" if report.holds else "fails"
        story.append(Paragraph(f"{label}: {verdict}", styles[verdict]))
        story += [Paragraph(violation.explanation, styles["normal"]) for violation in report.violations]
    return story


def render_report(
    inst: Instance, allocation: PartialAllocation, reports: Dict[str, FairnessReport], path: Union[str, Path]
) -> Path:
    """Render a PDF certificate of an allocation.

    :param inst: The instance.
    :param allocation: A complete allocation of the instance.
    :param reports: Property label to checker verdict.
    :param path: Where to write the PDF.
    :return: The path written.
    :raises ImportError: If ReportLab is not installed.
    """
    _require_reportlab()
    from reportlab.lib.pagesizes import A4
    from reportlab.lib.units import mm
    from reportlab.pdfgen.canvas import Canvas
    from reportlab.platypus import SimpleDocTemplate

    class CanvasWithPageNumbers(Canvas):
        """A canvas that numbers its pages."""

        def showPage(self):
            """Add a page number to the bottom of the page."""
            self.drawRightString(A4[0] - PAGE_MARGIN_MM * mm, 10 * mm, f"Page {self._pageNumber}")
            super().showPage()

    target = Path(path)
    margin = PAGE_MARGIN_MM * mm
    doc = SimpleDocTemplate(
        str(target),
        pagesize=A4,
        leftMargin=margin,
        rightMargin=margin,
        topMargin=margin,
        bottomMargin=margin,
        title="Allocation certificate",
    )
    doc.build(build_story(inst, allocation, reports), canvasmaker=CanvasWithPageNumbers)
    logger.info("Wrote report to %s", target)
    return target

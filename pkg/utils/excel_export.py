"""
Excel export
Writes a result table and its summary to an .xlsx workbook
"""

import logging
import math
import os

import openpyxl
from openpyxl.styles import Font

from utils.result_writer import result_header, result_rows

logger = logging.getLogger(__name__)


def _cell(value):
    """Non-finite floats become text; Excel has no NaN or infinity."""
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else str(value)
    return value


def xlsx_path(csv_path):
    base, _ = os.path.splitext(csv_path)
    return f"{base}.xlsx"


def export_workbook(path, records, summary):
    """
    Export trajectory rows and the summary block to one workbook

    Args:
        path: .xlsx output path
        records: trajectory records in index order
        summary: dict of summary statistics

    Returns:
        str: the path written
    """
    wb = openpyxl.Workbook()
    ws = wb.active
    ws.title = "Trajectories"

    # Write headers
    ws.append(result_header(records[0].n_classes))
    for cell in ws[1]:
        cell.font = Font(bold=True)

    # Write data rows
    for row in result_rows(records):
        ws.append([_cell(v) for v in row])

    summary_ws = wb.create_sheet("Summary")
    summary_ws.append(["key", "value"])
    for cell in summary_ws[1]:
        cell.font = Font(bold=True)
    for key in sorted(summary):
        value = summary[key]
        if isinstance(value, (list, tuple)):
            value = ', '.join(str(v) for v in value)
        summary_ws.append([key, _cell(value)])

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    wb.save(path)
    logger.info("[EXPORT] workbook -> %s", path)
    return path

"""
Output Formats

Serialises command results (OutputRecord) as JSON or CSV with a fixed
number of significant digits, and exports the recomputed Table 1 as CSV or
as an Excel workbook (openpyxl).
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from config.settings import Config
from utils.common import format_number, round_significant
from utils.logging_config import get_logger

logger = get_logger("utils.export_formats")


@dataclass
class OutputRecord:
    """Result of one CLI command."""

    command: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    errors: Dict[str, str] = field(default_factory=dict)
    deltas: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "inputs": _normalize(self.inputs),
            "results": _normalize(self.results),
            "warnings": list(self.warnings),
        }
        if self.errors:
            data["errors"] = dict(self.errors)
        if self.deltas is not None:
            data["deltas"] = _normalize(self.deltas)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OutputRecord":
        return cls(
            command=data["command"],
            inputs=dict(data.get("inputs", {})),
            results=_denormalize(data.get("results", {})),
            warnings=list(data.get("warnings", [])),
            errors=dict(data.get("errors", {})),
            deltas=_denormalize(data["deltas"]) if "deltas" in data else None,
        )


def _normalize(value: Any) -> Any:
    """Round floats to Config.SIGNIFICANT_DIGITS; non-finite floats become strings."""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float) or hasattr(value, "__float__"):
        number = float(value)
        if not math.isfinite(number):
            return format_number(number)
        return round_significant(number)
    return str(value)


def _denormalize(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _denormalize(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_denormalize(v) for v in value]
    if value in ("inf", "-inf", "nan"):
        return float(value)
    return value


def render_json(record: OutputRecord) -> str:
    return json.dumps(record.to_dict(), indent=2, ensure_ascii=False)


def _flatten(prefix: str, value: Any, rows: List[List[str]]):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append([prefix, format_number(value) if not isinstance(value, str) else value])


def render_csv(record: OutputRecord) -> str:
    """
    Key/value CSV of a record: results first, then errors and warnings.

    Nested result maps are flattened with dotted keys.
    """
    rows: List[List[str]] = []
    _flatten("", _normalize(record.results), rows)
    for name, message in record.errors.items():
        rows.append([f"error.{name}", message])
    for i, message in enumerate(record.warnings):
        rows.append([f"warning[{i}]", message])

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buffer.getvalue()


def render(record: OutputRecord, fmt: str = Config.DEFAULT_FORMAT) -> str:
    if fmt == "csv":
        return render_csv(record)
    return render_json(record)


# ==================== TABLE 1 ====================

def render_table1_csv(table) -> str:
    """
    CSV of a Table1Result: header plus one line per row.

    Args:
        table: generators.table1_generator.Table1Result
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(Config.CSV_TABLE1_HEADER)
    for row in table.rows:
        computed = row.computed
        writer.writerow([
            row.row,
            row.cdf,
            format_number(computed.get("cre")),
            format_number(computed.get("cre_bound")),
            format_number(computed.get("sum")),
            format_number(computed.get("sum_bound")),
            format_number(row.delta_max),
        ])
    return buffer.getvalue()


def generate_table1_excel(table, output_file: Path) -> bool:
    """
    Write the recomputed Table 1 (computed, published and delta per cell) to Excel.

    Args:
        table: generators.table1_generator.Table1Result
        output_file: Output Excel file path

    Returns:
        True if successful, False otherwise
    """
    try:
        from openpyxl import Workbook
        from openpyxl.styles import Alignment, Font, PatternFill
        from openpyxl.utils import get_column_letter
    except ImportError:
        logger.warning("⚠ openpyxl not installed - Excel export not available")
        logger.warning("  Install with: pip install openpyxl")
        return False

    from core.reference_values import TABLE1_COLUMNS

    wb = Workbook()
    ws = wb.active
    ws.title = "Table 1"

    headers = ["Row", "CDF"]
    for column in TABLE1_COLUMNS:
        headers += [f"{column} computed", f"{column} published", f"{column} delta"]
    headers += ["Within tolerance"]
    ws.append(headers)

    # Style header row
    for cell in ws[1]:
        cell.font = Font(bold=True, color="FFFFFF")
        cell.fill = PatternFill(start_color="4472C4", end_color="4472C4", fill_type="solid")
        cell.alignment = Alignment(horizontal="center")

    for row in table.rows:
        values = [row.row, row.cdf]
        for column in TABLE1_COLUMNS:
            values += [row.computed.get(column), row.published.get(column), row.deltas.get(column)]
        values.append("Yes" if row.within_tolerance else "No")
        ws.append(values)

    # Auto-adjust column widths
    for idx, col in enumerate(ws.columns, 1):
        max_length = max(len(str(cell.value)) if cell.value is not None else 0 for cell in col)
        ws.column_dimensions[get_column_letter(idx)].width = min(max_length + 2, 50)

    output_file = Path(output_file)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    wb.save(output_file)
    logger.info(f"✓ Table 1 workbook written to {output_file}")
    return True

"""
Formatting utilities for efgrid command output
"""

import json
from typing import Any, Dict, List, Sequence

from src.config.settings import DECIMAL_PLACES


def format_number(value: float) -> str:
    """Fixed-point rendering used for every real number on stdout"""
    text = f"{value:.{DECIMAL_PLACES}f}"
    # -0.0000000000 and 0.0000000000 must print the same
    if text.startswith("-") and float(text) == 0.0:
        text = text[1:]
    return text


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        return float(format_number(value))
    return value


def format_rows(columns: Sequence[str], rows: Sequence[Sequence[Any]], output_format: str) -> str:
    """Render result rows as TSV (no header) or as a JSON array of objects"""
    if output_format == "json":
        records: List[Dict[str, Any]] = [
            {column: _json_value(value) for column, value in zip(columns, row)} for row in rows
        ]
        return json.dumps(records, ensure_ascii=False, sort_keys=False) + "\n"
    return "".join("\t".join(_cell(value) for value in row) + "\n" for row in rows)


def format_single(column: str, value: Any, output_format: str) -> str:
    """Render a single scalar result"""
    if output_format == "json":
        return json.dumps({column: _json_value(value)}, ensure_ascii=False) + "\n"
    return _cell(value) + "\n"


def format_parse_errors(path: str, errors: Sequence[Sequence[Any]]) -> str:
    """One 'file:line: message' diagnostic per rejected line"""
    return "".join(f"{path}:{number}: {message}\n" for number, message in errors)

"""Report writers (json-lines or csv) and the matching readers."""

from __future__ import annotations

import csv
import io
import json
import threading
from typing import Any, TextIO

from pydantic import BaseModel

from src.errors import InvalidInputError
from src.models.job import OutputFormat
from src.models.reports import REPORT_ADAPTER, AnyReport


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return json.dumps(value)


def _uncell(text: str) -> Any:
    if text == "":
        return None
    if text[0] in "[{":
        try:
            return json.loads(text)
        except json.JSONDecodeError:
            return text
    return text


class ReportWriter:
    """Writes one report per line; safe to share between sweep workers."""

    def __init__(self, stream: TextIO, fmt: OutputFormat = "json-lines") -> None:
        self._stream = stream
        self._format = fmt
        self._lock = threading.Lock()
        self._header: tuple[str, ...] | None = None

    def write(self, report: BaseModel) -> None:
        with self._lock:
            if self._format == "json-lines":
                self._stream.write(report.model_dump_json() + "\n")
            else:
                self._write_csv(report)
            self._stream.flush()

    def _write_csv(self, report: BaseModel) -> None:
        data = report.model_dump(mode="json")
        header = tuple(data)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if header != self._header:
            writer.writerow(header)
            self._header = header
        writer.writerow([_cell(data[key]) for key in header])
        self._stream.write(buffer.getvalue())


def read_reports(text: str, fmt: OutputFormat = "json-lines") -> list[AnyReport]:
    """Parse emitted output back into report models."""
    if fmt == "json-lines":
        return [REPORT_ADAPTER.validate_json(line) for line in text.splitlines() if line.strip()]
    reports: list[AnyReport] = []
    header: list[str] | None = None
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        if row[0] == "command":
            header = row
            continue
        if header is None:
            raise InvalidInputError("csv output starts without a header row")
        record = {key: _uncell(cell) for key, cell in zip(header, row, strict=True)}
        reports.append(REPORT_ADAPTER.validate_python(record))
    return reports

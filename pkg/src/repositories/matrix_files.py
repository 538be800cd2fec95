"""
Matrix and spectrum ingestion.

Text format: first line d, then d rows of d whitespace-separated numbers.
Structured format: a JSON object {"matrix": [[...], ...]}.
Spectrum strings: comma-separated terms "a", "a+bi", "a-bi", with an
optional ":r" block suffix, e.g. "-0.3:2, -0.8+0.9i".
"""

from __future__ import annotations

import logging
import math
import re
from pathlib import Path

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from src.errors import MatrixParseError, SpectrumParseError
from src.models.spectrum import RealMatrix, SpectralComponent, Spectrum

logger = logging.getLogger(__name__)

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(
    rf"^(?P<re>[+-]?{_NUMBER})"
    rf"(?:(?P<sign>[+\-±])(?P<im>{_NUMBER})?i)?"
    r"(?::(?P<block>\d+))?$"
)


class MatrixDocument(BaseModel):
    model_config = ConfigDict(extra="ignore")

    matrix: list[list[float]]

    @field_validator("matrix")
    @classmethod
    def _square(cls, rows: list[list[float]]) -> list[list[float]]:
        if not rows:
            raise ValueError("matrix must have at least one row")
        for i, row in enumerate(rows, start=1):
            if len(row) != len(rows):
                raise ValueError(f"row {i} has {len(row)} entries, expected {len(rows)}")
            if not all(math.isfinite(v) for v in row):
                raise ValueError(f"row {i} has a non-finite entry")
        return rows


def _parse_structured(text: str) -> RealMatrix:
    try:
        doc = MatrixDocument.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise MatrixParseError(f"invalid matrix document: {first['msg']}") from exc
    return RealMatrix.from_rows(doc.matrix)


def _tokens(line: str) -> list[tuple[int, str]]:
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def _number(token: str, line: int, column: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MatrixParseError(f"non-numeric token {token!r}", line=line, column=column) from None
    if not math.isfinite(value):
        raise MatrixParseError(f"non-finite entry {token!r}", line=line, column=column)
    return value


def _parse_text(text: str) -> RealMatrix:
    lines = [(n, raw) for n, raw in enumerate(text.splitlines(), start=1) if raw.strip()]
    if not lines:
        raise MatrixParseError("empty matrix file")
    header_line, header = lines[0]
    head = _tokens(header)
    if len(head) != 1:
        raise MatrixParseError("first line must hold only the dimension d", line=header_line)
    column, token = head[0]
    if not token.isdigit() or int(token) < 1:
        raise MatrixParseError(
            f"dimension must be a positive integer, got {token!r}", line=header_line, column=column
        )
    d = int(token)
    body = lines[1:]
    if len(body) != d:
        last_line = body[-1][0] if body else header_line
        raise MatrixParseError(f"expected {d} rows, found {len(body)}", line=last_line)
    rows: list[list[float]] = []
    for row_index, (n, raw) in enumerate(body, start=1):
        toks = _tokens(raw)
        if len(toks) != d:
            raise MatrixParseError(f"row {row_index} has {len(toks)} entries, expected {d}", line=n)
        rows.append([_number(tok, n, col) for col, tok in toks])
    return RealMatrix.from_rows(rows)


def parse_matrix_text(text: str) -> RealMatrix:
    if text.lstrip().startswith("{"):
        return _parse_structured(text)
    return _parse_text(text)


def parse_matrix_file(path: Path | str) -> RealMatrix:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise MatrixParseError(f"cannot read {p}: {exc.strerror}") from exc
    matrix = parse_matrix_text(text)
    logger.debug("read %dx%d matrix from %s", matrix.dim, matrix.dim, p)
    return matrix


def parse_spectrum(text: str) -> Spectrum:
    terms = [t.replace(" ", "") for t in text.split(",")]
    if not any(terms):
        raise SpectrumParseError("spectrum string is empty")
    comps: list[SpectralComponent] = []
    for k, term in enumerate(terms, start=1):
        match = _TERM.match(term)
        if match is None:
            raise SpectrumParseError(f"term {k} {term!r} is not of the form a, a+bi or a:r")
        beta = 0.0
        if match["sign"] is not None:
            beta = float(match["im"]) if match["im"] else 1.0
        block = int(match["block"]) if match["block"] else 1
        try:
            comps.append(SpectralComponent(float(match["re"]), abs(beta), block))
        except ValueError as exc:
            raise SpectrumParseError(f"term {k} {term!r}: {exc}") from exc
    try:
        return Spectrum(tuple(comps))
    except ValueError as exc:
        raise SpectrumParseError(str(exc)) from exc

"""
Shared pytest fixtures.

  - Unit tests build domain values in memory (no I/O)
  - Integration tests write matrix files into tmp_path and drive the CLI
  - Behavioral tests run the full pipeline on the reference examples
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from pathlib import Path

import numpy as np
import pytest

from src.config import get_settings
from src.models.quasipoly import Basis
from src.models.spectrum import Spectrum
from src.services.quasipoly import build_basis
from tests.fixtures.reference_matrices import EX1, EX2

MatrixWriter = Callable[..., Path]


@pytest.fixture(autouse=True)
def _fresh_settings() -> Iterator[None]:
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def real_pair() -> Spectrum:
    return EX1.spectrum


@pytest.fixture
def complex_pair() -> Spectrum:
    return EX2.spectrum


@pytest.fixture
def real_basis(real_pair: Spectrum) -> Basis:
    return build_basis(real_pair)


@pytest.fixture
def complex_basis(complex_pair: Spectrum) -> Basis:
    return build_basis(complex_pair)


@pytest.fixture
def write_matrix(tmp_path: Path) -> MatrixWriter:
    """Write a matrix in the text format and return its path."""

    def _write(rows: Sequence[Sequence[float]], name: str = "a") -> Path:
        path = tmp_path / f"{name}.txt"
        body = "\n".join(" ".join(repr(float(v)) for v in row) for row in rows)
        path.write_text(f"{len(rows)}\n{body}\n", encoding="utf-8")
        return path

    return _write

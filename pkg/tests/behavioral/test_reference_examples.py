"""
Behavioral tests: published cut-tail points for the reference matrices.

Each case goes matrix -> eigenvalues -> exchange/bisection driver, the
same path the CLI takes for --matrix input.
"""

from __future__ import annotations

import logging

import numpy as np
import pytest

from src.services.chebexchange import active_signs, exchange_solve
from src.services.cuttail import boundary_predicate, find_cut_tail
from src.services.quasipoly import build_basis
from src.services.spectra import eigenvalues
from tests.fixtures.reference_matrices import ALL_EXAMPLES, EX1, EX3, EX5, Example


@pytest.mark.behavioral
@pytest.mark.slow
class TestReferenceExamples:
    @pytest.mark.parametrize("example", ALL_EXAMPLES, ids=lambda e: e.name)
    def test_cut_tail_point(self, example: Example) -> None:
        spectrum = eigenvalues(example.matrix)
        assert spectrum.dim_pa == example.spectrum.dim_pa
        result = find_cut_tail(spectrum)
        assert result.t_cut == pytest.approx(example.t_cut, abs=example.tolerance)

    def test_defective_eigenvalue_is_logged(self, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level(logging.INFO, logger="src.services.spectra"):
            spectrum = eigenvalues(EX5.matrix)
        assert any("Jordan structure" in r.message for r in caplog.records)
        assert max(c.block for c in spectrum) == 2

    @pytest.mark.parametrize("example", ALL_EXAMPLES, ids=lambda e: e.name)
    def test_predicate_flips_exactly_once(self, example: Example) -> None:
        basis = build_basis(example.spectrum)
        grid = np.linspace(0.2 * example.t_cut, 2.0 * example.t_cut, 20)
        flags = [boundary_predicate(basis, float(t)) for t in grid]
        flips = sum(a != b for a, b in zip(flags, flags[1:], strict=False))
        assert flags[0] is True
        assert flags[-1] is False
        assert flips == 1

    @pytest.mark.parametrize("offset", [0.0, 0.01])
    @pytest.mark.parametrize("example", [EX1, EX3], ids=lambda e: e.name)
    def test_real_spectrum_alternates_at_the_cut_tail_point(
        self, example: Example, offset: float
    ) -> None:
        basis = build_basis(example.spectrum)
        # upper end of the final bracket: within time_tol of T_cut, value just above one
        t_cut = find_cut_tail(example.spectrum).bracket[1]
        result = exchange_solve(basis, t_cut + offset, eps=1e-9)
        signs = active_signs(result)
        assert 2 <= len(signs) <= basis.dim
        assert np.all(signs[:-1] * signs[1:] < 0)

    def test_published_four_dimensional_value_matches_a_looser_threshold(self) -> None:
        basis = build_basis(EX3.spectrum)
        excess = exchange_solve(basis, EX3.published, eps=1e-7).value - 1.0
        assert 5e-5 < excess < 2e-4
        result = find_cut_tail(EX3.spectrum, value_tol=1e-4)
        assert result.t_cut == pytest.approx(EX3.published, abs=0.01)

"""Unit tests for the quasipolynomial space: basis, evaluation, derivative, maximization."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.errors import InvalidInputError
from src.models.quasipoly import Basis, BasisFunction, Phase, QuasiPolynomial
from src.models.spectrum import Spectrum
from src.services.quasipoly import (
    AbsMaximizer,
    build_basis,
    derivative,
    evaluate,
    grid_size,
    sup_abs_on_interval,
)
from tests.fixtures.grid_oracle import certified_tail_start
from tests.fixtures.reference_matrices import EX2, EX4, EX5


@pytest.mark.unit
class TestBuildBasis:
    def test_real_pair(self, real_basis: Basis) -> None:
        assert real_basis.describe() == ["exp(-0.2t)", "exp(-0.5t)"]

    def test_complex_pair_has_cosine_and_sine(self, complex_basis: Basis) -> None:
        assert complex_basis.functions == (
            BasisFunction(0, -0.1, 0.3, Phase.COSINE),
            BasisFunction(0, -0.1, 0.3, Phase.SINE),
        )

    def test_jordan_block_adds_powers_from_zero(self) -> None:
        basis = build_basis(Spectrum.of((-0.3, 0.0, 2)))
        assert [f.power for f in basis.functions] == [0, 1]
        assert basis.describe() == ["exp(-0.3t)", "t*exp(-0.3t)"]

    @pytest.mark.parametrize("spectrum", [EX4.spectrum, EX5.spectrum], ids=["ex4", "ex5"])
    def test_dimension_equals_dim_pa(self, spectrum: Spectrum) -> None:
        assert build_basis(spectrum).dim == spectrum.dim_pa

    def test_sine_branch_needs_a_frequency(self) -> None:
        with pytest.raises(InvalidInputError):
            BasisFunction(0, -0.2, 0.0, Phase.SINE)

    def test_duplicates_rejected(self) -> None:
        f = BasisFunction(0, -0.2)
        with pytest.raises(InvalidInputError):
            Basis((f, f))


@pytest.mark.unit
class TestEvaluate:
    def test_exponential_at_zero(self, real_basis: Basis) -> None:
        assert evaluate(QuasiPolynomial(real_basis, [1.0, 0.0]), 0.0) == 1.0

    def test_cosine_and_sine_at_zero(self, complex_basis: Basis) -> None:
        assert evaluate(QuasiPolynomial(complex_basis, [1.0, 0.0]), 0.0) == 1.0
        assert evaluate(QuasiPolynomial(complex_basis, [0.0, 1.0]), 0.0) == 0.0

    def test_combination(self, real_basis: Basis) -> None:
        p = QuasiPolynomial(real_basis, [2.0, -1.0])
        assert evaluate(p, 1.0) == pytest.approx(2 * math.exp(-0.2) - math.exp(-0.5), rel=1e-14)

    def test_large_powers_use_the_log_magnitude(self) -> None:
        f = BasisFunction(150, -0.5)
        expected = math.exp(150 * math.log(500.0) - 250.0)
        assert f.values([500.0])[0] == pytest.approx(expected, rel=1e-12)
        assert f.values([0.0])[0] == 0.0

    def test_linearity(self, rng: np.random.Generator) -> None:
        basis = build_basis(EX5.spectrum)
        p = QuasiPolynomial(basis, rng.normal(size=basis.dim))
        q = QuasiPolynomial(basis, rng.normal(size=basis.dim))
        t = 2.7
        assert evaluate(p * 2.0 - q * 3.0, t) == pytest.approx(
            2.0 * evaluate(p, t) - 3.0 * evaluate(q, t), rel=1e-12, abs=1e-14
        )

    def test_coefficient_count_checked(self, real_basis: Basis) -> None:
        with pytest.raises(InvalidInputError):
            QuasiPolynomial(real_basis, [1.0])

    def test_mixing_bases_rejected(self, real_basis: Basis, complex_basis: Basis) -> None:
        with pytest.raises(InvalidInputError):
            QuasiPolynomial(real_basis, [1.0, 0.0]) + QuasiPolynomial(complex_basis, [1.0, 0.0])


@pytest.mark.unit
class TestDerivative:
    def test_exponential(self, real_basis: Basis) -> None:
        d = derivative(QuasiPolynomial(real_basis, [1.0, 0.0]))
        np.testing.assert_allclose(d.coeffs, [-0.2, 0.0])

    def test_jordan_term(self) -> None:
        basis = build_basis(Spectrum.of((-0.3, 0.0, 2)))
        d = derivative(QuasiPolynomial(basis, [0.0, 1.0]))
        np.testing.assert_allclose(d.coeffs, [1.0, -0.3])

    def test_stays_in_the_same_basis(self, complex_basis: Basis) -> None:
        p = QuasiPolynomial(complex_basis, [0.4, -1.1])
        assert derivative(p).basis == p.basis

    @pytest.mark.parametrize(
        "spectrum",
        [EX5.spectrum, Spectrum.of((-0.4, 0.5, 2), (-0.1, 0.0))],
        ids=["ex5", "complex-jordan"],
    )
    def test_matches_central_difference(self, spectrum: Spectrum, rng: np.random.Generator) -> None:
        basis = build_basis(spectrum)
        h = 1e-5
        for _ in range(5):
            p = QuasiPolynomial(basis, rng.normal(size=basis.dim))
            dp = derivative(p)
            for t in rng.uniform(0.1, 15.0, size=4):
                fd = (p(t + h) - p(t - h)) / (2 * h)
                assert abs(fd - dp(t)) <= 1e-6

    def test_open_basis_is_rejected(self) -> None:
        basis = Basis((BasisFunction(1, -0.3),))
        with pytest.raises(InvalidInputError, match="not closed"):
            _ = basis.differentiation_matrix


@pytest.mark.unit
class TestSupAbs:
    def test_monotone_decay_peaks_at_zero(self, real_basis: Basis) -> None:
        value, t = sup_abs_on_interval(QuasiPolynomial(real_basis, [1.0, 0.0]), 5.0)
        assert value == pytest.approx(1.0)
        assert t == 0.0

    def test_damped_sine_first_stationary_point(self, complex_basis: Basis) -> None:
        p = QuasiPolynomial(complex_basis, [0.0, 1.0])
        value, t = sup_abs_on_interval(p, 20.0)
        t_star = math.atan(3.0) / 0.3
        assert t == pytest.approx(t_star, abs=1e-8)
        assert value == pytest.approx(math.exp(-0.1 * t_star) * math.sin(0.3 * t_star), rel=1e-12)

    def test_increasing_function_peaks_at_the_endpoint(self, real_basis: Basis) -> None:
        p = QuasiPolynomial(real_basis, [1.0, -1.0])
        value, t = sup_abs_on_interval(p, 2.0)
        assert t == 2.0
        assert value == pytest.approx(math.exp(-0.4) - math.exp(-1.0))
        dense = np.abs(p.values(np.linspace(0.0, 2.0, 200_001))).max()
        assert value >= dense - 1e-15

    def test_doubling_the_grid_finds_nothing_larger(self, rng: np.random.Generator) -> None:
        basis = build_basis(EX4.spectrum)
        for _ in range(5):
            p = QuasiPolynomial(basis, rng.normal(size=basis.dim))
            coarse, _ = sup_abs_on_interval(p, 30.0)
            fine, _ = sup_abs_on_interval(p, 30.0, grid=2)
            assert fine <= coarse + 1e-12 * max(1.0, coarse)


@pytest.mark.unit
class TestTailBound:
    @pytest.mark.parametrize("example", [EX2, EX4, EX5], ids=lambda e: e.name)
    def test_nothing_beyond_the_tail_start_exceeds_the_target(
        self, example, rng: np.random.Generator
    ) -> None:
        basis = build_basis(example.spectrum)
        for _ in range(5):
            p = QuasiPolynomial(basis, rng.normal(size=basis.dim))
            head, _ = sup_abs_on_interval(p, 1.0)
            target = 1e-3 * head
            start = certified_tail_start(p, target)
            far = start + 50.0 / basis.slowest_decay
            assert np.abs(p.values(np.linspace(start, far, 20_001))).max() <= target

    @pytest.mark.parametrize("example", [EX2, EX4, EX5], ids=lambda e: e.name)
    def test_sup_up_to_the_tail_start_is_the_half_line_sup(
        self, example, rng: np.random.Generator
    ) -> None:
        basis = build_basis(example.spectrum)
        for _ in range(5):
            p = QuasiPolynomial(basis, rng.normal(size=basis.dim))
            head, _ = sup_abs_on_interval(p, 1.0)
            start = max(1.0, certified_tail_start(p, head))
            near, _ = sup_abs_on_interval(p, start)
            long, _ = sup_abs_on_interval(p, 3.0 * start + 200.0)
            assert near == pytest.approx(long, rel=1e-12)

    def test_small_coefficients_need_no_tail(self, real_basis: Basis) -> None:
        assert certified_tail_start(QuasiPolynomial(real_basis, [0.1, 0.1]), 1.0) == 0.0

    def test_rejects_non_positive_target(self, real_basis: Basis) -> None:
        with pytest.raises(ValueError):
            certified_tail_start(QuasiPolynomial(real_basis, [1.0, 0.0]), 0.0)


@pytest.mark.unit
class TestAbsMaximizer:
    def test_grid_resolves_fast_oscillations(self) -> None:
        basis = build_basis(Spectrum.of((-0.1, 50.0)))
        assert grid_size(basis, 100.0) >= 64 * 100 * 50 / (2 * math.pi)

    def test_local_maxima_sorted_by_value(self, complex_basis: Basis) -> None:
        maxima = AbsMaximizer(complex_basis, 40.0).local_maxima([0.0, 1.0], window=0.99)
        values = [m.value for m in maxima]
        assert values == sorted(values, reverse=True)
        assert len(maxima) >= 3

    def test_rejects_non_positive_horizon(self, real_basis: Basis) -> None:
        with pytest.raises(InvalidInputError):
            AbsMaximizer(real_basis, 0.0)

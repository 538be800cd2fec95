"""Unit tests for dwell-windowed switching: admissibility, simulation and the capping probe."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from src.errors import InvalidInputError, NotHurwitzError
from src.models.spectrum import RealMatrix, Spectrum
from src.models.switching import Mode, SwitchingLaw, SwitchingSystem
from src.services.switchsim import (
    INTERIOR_SAMPLES,
    build_system,
    bundled_system,
    capping_probe,
    growth_exponent,
    simulate,
    validate_law,
    worst_case_search,
)
from tests.fixtures.reference_matrices import EX1, EX2


@pytest.fixture(scope="module")
def system() -> SwitchingSystem:
    return bundled_system(dwell_min=0.1)


@pytest.mark.unit
class TestModel:
    def test_bundled_caps(self, system: SwitchingSystem) -> None:
        assert [m.label for m in system.modes] == ["real-pair", "complex-pair"]
        assert system.modes[0].cap == pytest.approx(0.1 + EX1.t_cut, abs=1e-5)
        assert system.modes[1].cap == pytest.approx(0.1 + EX2.t_cut, abs=1e-5)

    def test_uncapped_window_is_open(self, system: SwitchingSystem) -> None:
        assert system.modes[0].window(capped=False) == (0.1, math.inf)

    def test_explicit_dwell_max_overrides_the_cap(self) -> None:
        mode = Mode("m", EX1.matrix, EX1.spectrum, EX1.t_cut, 0.1, dwell_max=2.0)
        assert mode.window(capped=True) == (0.1, 2.0)

    def test_dwell_max_must_exceed_dwell_min(self) -> None:
        with pytest.raises(InvalidInputError):
            Mode("m", EX1.matrix, EX1.spectrum, EX1.t_cut, 0.5, dwell_max=0.5)

    def test_unstable_mode_rejected(self) -> None:
        unstable = RealMatrix.from_rows([[0.1, 0.0], [0.0, -0.5]])
        with pytest.raises(NotHurwitzError):
            Mode("u", unstable, Spectrum.of((0.1, 0.0), (-0.5, 0.0)), 0.0, 0.1)

    def test_consecutive_repeats_rejected(self) -> None:
        with pytest.raises(InvalidInputError, match="repeats"):
            SwitchingLaw(((0, 1.0), (0, 2.0)))

    def test_mixed_dimensions_rejected(self, system: SwitchingSystem) -> None:
        one = RealMatrix.from_rows([[-1.0]])
        odd = Mode("one", one, Spectrum.of((-1.0, 0.0)), 0.0, 0.1)
        with pytest.raises(InvalidInputError, match="dimension"):
            SwitchingSystem((system.modes[0], odd))


@pytest.mark.unit
class TestBuildSystem:
    def test_computes_t_cut_per_mode(self) -> None:
        sys = build_system([("a", EX1.matrix), ("b", EX2.matrix)], [0.1, 0.2], closed_form=True)
        assert sys.modes[0].t_cut == pytest.approx(EX1.t_cut, abs=1e-5)
        assert sys.modes[1].dwell_min == 0.2

    def test_dwell_count_must_match(self) -> None:
        with pytest.raises(InvalidInputError):
            build_system([("a", EX1.matrix)], [0.1, 0.2], closed_form=True)


@pytest.mark.unit
class TestValidateLaw:
    def test_inside_the_cap(self, system: SwitchingSystem) -> None:
        law = SwitchingLaw(((0, 1.0), (1, 2.0)))
        assert validate_law(system, law, capped=True)

    def test_long_dwell_needs_the_uncapped_family(self, system: SwitchingSystem) -> None:
        law = SwitchingLaw(((0, 5.0),))
        assert not validate_law(system, law, capped=True)
        assert validate_law(system, law, capped=False)

    def test_short_dwell_always_rejected(self, system: SwitchingSystem) -> None:
        law = SwitchingLaw(((1, 0.05),))
        assert not validate_law(system, law, capped=False)

    def test_unknown_mode(self, system: SwitchingSystem) -> None:
        assert not validate_law(system, SwitchingLaw(((2, 1.0),)), capped=False)


@pytest.mark.unit
class TestSimulate:
    def test_empty_law_keeps_the_state(self, system: SwitchingSystem) -> None:
        result = simulate(system, SwitchingLaw(), [3.0, 4.0])
        np.testing.assert_array_equal(result.final, [3.0, 4.0])
        assert result.times.tolist() == [0.0]
        assert result.norms.tolist() == [5.0]

    def test_single_segment_is_one_exponential(self, system: SwitchingSystem) -> None:
        x0 = np.array([1.0, -2.0])
        result = simulate(system, SwitchingLaw(((1, 2.5),)), x0)
        np.testing.assert_allclose(result.final, expm(2.5 * EX2.matrix.entries) @ x0, rtol=1e-10)
        assert len(result.times) == INTERIOR_SAMPLES + 2
        assert result.times[-1] == 2.5

    def test_matches_piecewise_integration(self, system: SwitchingSystem) -> None:
        law = SwitchingLaw(((0, 0.7), (1, 3.1), (0, 2.2), (1, 0.4), (0, 3.9), (1, 1.5)))
        x0 = np.array([0.3, 1.0])
        x = x0.copy()
        for mode_index, duration in law.segments:
            a = system.modes[mode_index].matrix.entries
            sol = solve_ivp(
                lambda _t, y, a=a: a @ y,
                (0.0, duration),
                x,
                method="DOP853",
                rtol=1e-11,
                atol=1e-13,
            )
            x = sol.y[:, -1]
        result = simulate(system, law, x0)
        np.testing.assert_allclose(result.final, x, atol=1e-6)
        assert np.all(np.diff(result.times) > 0)
        assert result.times[-1] == pytest.approx(law.total_duration)

    def test_wrong_state_length(self, system: SwitchingSystem) -> None:
        with pytest.raises(InvalidInputError):
            simulate(system, SwitchingLaw(), [1.0, 2.0, 3.0])


@pytest.mark.unit
class TestWorstCaseSearch:
    def test_single_mode_cannot_beat_its_decay_rate(self) -> None:
        sys = build_system([("a", EX1.matrix)], 0.1, closed_form=True)
        result = worst_case_search(sys, 20.0, capped=True, budget=8, seed=3)
        assert result.exponent <= -0.2 + 0.01

    def test_deterministic_for_a_seed(self, system: SwitchingSystem) -> None:
        first = worst_case_search(system, 30.0, capped=True, budget=6, seed=11)
        second = worst_case_search(system, 30.0, capped=True, budget=6, seed=11)
        assert first == second

    def test_law_respects_the_cap(self, system: SwitchingSystem) -> None:
        result = worst_case_search(system, 30.0, capped=True, budget=6, seed=5)
        assert validate_law(system, result.law, capped=True)
        assert result.law.total_duration >= 30.0
        assert result.exponent == pytest.approx(growth_exponent(system, result.law), abs=1e-9)

    def test_incumbent_is_never_lost(self, system: SwitchingSystem) -> None:
        incumbent = worst_case_search(system, 30.0, capped=True, budget=6, seed=1)
        result = worst_case_search(
            system, 30.0, capped=False, budget=1, seed=2, incumbent=incumbent
        )
        assert result.exponent >= incumbent.exponent

    def test_budget_must_be_positive(self, system: SwitchingSystem) -> None:
        with pytest.raises(InvalidInputError, match="budget"):
            worst_case_search(system, 30.0, capped=True, budget=0, seed=0)

    def test_capped_search_approaches_the_rotation_decay_rate(
        self, system: SwitchingSystem
    ) -> None:
        horizon = 10.0 * max(mode.cap for mode in system.modes)
        result = worst_case_search(system, horizon, capped=True, budget=4, seed=0)
        # the rotation mode contracts by exactly e^{-0.1 t}; every real dwell costs more
        assert -0.12 <= result.exponent <= -0.1 + 1e-12


@pytest.mark.unit
class TestCappingProbe:
    def test_uncapped_dominates_capped(self, system: SwitchingSystem) -> None:
        probe = capping_probe(system, 30.0, budget=6, seed=7)
        assert probe.gap >= 0.0
        assert validate_law(system, probe.capped.law, capped=False)
        assert probe.capped.capped
        assert not probe.uncapped.capped


@pytest.mark.unit
class TestGrowthExponent:
    def test_single_diagonal_segment(self, system: SwitchingSystem) -> None:
        assert growth_exponent(system, SwitchingLaw(((0, 4.0),))) == pytest.approx(-0.2)

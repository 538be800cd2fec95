"""
Unit tests for src.main.

Runners are mocked; the pipeline itself is covered by the integration suite.
"""

import logging

import pytest
from pytest_mock import MockerFixture

import src.main as m
from src.errors import NotHurwitzError, NumericalError
from src.models.reports import ErrorReport, Verify2dReport
from src.repositories.output import read_reports


def _report() -> Verify2dReport:
    return Verify2dReport(
        source="spectrum:-0.1+0.3i",
        spectrum=[],
        t_exchange=5.99,
        t_closed_form=5.99,
        t_geometric=5.99,
        horizon=120.0,
        samples=4000,
        max_discrepancy=0.0,
    )


@pytest.mark.unit
class TestHandleSignal:
    def test_sets_running_false(self) -> None:
        original = m._running
        try:
            m._handle_signal(15, None)
            assert m._running is False
            assert m._is_running() is False
        finally:
            m._running = original

    def test_accepts_any_signum(self, caplog: pytest.LogCaptureFixture) -> None:
        original = m._running
        try:
            with caplog.at_level(logging.INFO, logger="src.main"):
                m._handle_signal(2, None)
            assert m._running is False
            assert any("Received signal 2" in r.message for r in caplog.records)
        finally:
            m._running = original


@pytest.mark.unit
class TestBuildParser:
    def test_defaults_come_from_settings(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("CUTTAIL_TIME_TOL", "0.001")
        args = m.build_parser().parse_args(["cut-tail", "--spectrum", "-0.5"])
        assert args.time_tol == 0.001
        assert args.eps == 1e-7
        assert args.timestamps is True
        assert args.matrix == []

    def test_repeated_matrix_flags(self) -> None:
        args = m.build_parser().parse_args(["sweep", "--matrix", "a", "--matrix", "b"])
        assert [p.name for p in args.matrix] == ["a", "b"]

    def test_extremal_requires_at(self) -> None:
        with pytest.raises(SystemExit):
            m.build_parser().parse_args(["extremal", "--spectrum", "-0.5"])

    def test_no_timestamps(self) -> None:
        args = m.build_parser().parse_args(["cut-tail", "--spectrum", "-1", "--no-timestamps"])
        assert args.timestamps is False

    @pytest.mark.parametrize(
        ("argv", "expected"),
        [
            (["--spectrum", "-0.1+0.3i"], ["--spectrum=-0.1+0.3i"]),
            (["--spectrum", "-0.3:2, -0.8+0.9i"], ["--spectrum=-0.3:2, -0.8+0.9i"]),
            (["--spectrum", "--eps", "1e-7"], ["--spectrum", "--eps", "1e-7"]),
            (["--eps", "-0.5"], ["--eps", "-0.5"]),
        ],
    )
    def test_spectrum_values_are_attached(self, argv: list[str], expected: list[str]) -> None:
        assert m._attach_spectrum_values(argv) == expected


@pytest.mark.unit
class TestMain:
    def test_registers_signal_handlers(self, mocker: MockerFixture) -> None:
        mock_signal = mocker.patch("src.main.signal.signal")
        mocker.patch.dict(m.RUNNERS, {"verify2d": lambda _cfg: _report()})
        assert m.main(["verify2d", "--spectrum=-0.1+0.3i"]) == 0
        assert mock_signal.call_count == 2

    def test_logs_startup_message(
        self, mocker: MockerFixture, caplog: pytest.LogCaptureFixture
    ) -> None:
        mocker.patch("src.main.signal.signal")
        mocker.patch.dict(m.RUNNERS, {"verify2d": lambda _cfg: _report()})
        with caplog.at_level(logging.INFO, logger="src.main"):
            m.main(["verify2d", "--spectrum=-0.1+0.3i"])
        assert any("cuttail verify2d starting" in r.message for r in caplog.records)

    def test_writes_the_report(
        self, mocker: MockerFixture, capsys: pytest.CaptureFixture[str]
    ) -> None:
        mocker.patch("src.main.signal.signal")
        mocker.patch.dict(m.RUNNERS, {"verify2d": lambda _cfg: _report()})
        m.main(["verify2d", "--spectrum=-0.1+0.3i"])
        assert read_reports(capsys.readouterr().out) == [_report()]

    def test_invalid_job_exits_2(self, mocker: MockerFixture) -> None:
        mocker.patch("src.main.signal.signal")
        assert m.main(["cut-tail"]) == 2

    def test_spectrum_value_as_its_own_token(self, mocker: MockerFixture) -> None:
        mocker.patch("src.main.signal.signal")
        runner = mocker.Mock(return_value=_report())
        mocker.patch.dict(m.RUNNERS, {"verify2d": runner})
        assert m.main(["verify2d", "--spectrum", "-0.1+0.3i"]) == 0
        (cfg,), _ = runner.call_args
        assert cfg.spectrum == "-0.1+0.3i"

    def test_invalid_environment_exits_2(
        self,
        mocker: MockerFixture,
        monkeypatch: pytest.MonkeyPatch,
        caplog: pytest.LogCaptureFixture,
    ) -> None:
        mocker.patch("src.main.signal.signal")
        monkeypatch.setenv("CUTTAIL_EPS", "not-a-number")
        with caplog.at_level(logging.ERROR):
            assert m.main(["cut-tail", "--spectrum=-0.5"]) == 2
        assert any("CUTTAIL_ setting EPS" in r.message for r in caplog.records)

    @pytest.mark.parametrize(
        ("exc", "code"),
        [(NotHurwitzError("eigenvalue 0.1"), 2), (NumericalError("no flip"), 1)],
    )
    def test_failures_map_to_exit_codes(
        self,
        mocker: MockerFixture,
        capsys: pytest.CaptureFixture[str],
        exc: Exception,
        code: int,
    ) -> None:
        mocker.patch("src.main.signal.signal")
        mocker.patch.dict(m.RUNNERS, {"cut-tail": mocker.Mock(side_effect=exc)})
        assert m.main(["cut-tail", "--spectrum", "-0.5"]) == code
        (report,) = read_reports(capsys.readouterr().out)
        assert isinstance(report, ErrorReport)
        assert report.kind == type(exc).__name__
        assert report.exit_code == code

    def test_sweep_goes_to_the_sweep_runner(self, mocker: MockerFixture) -> None:
        mocker.patch("src.main.signal.signal")
        run_sweep = mocker.patch("src.main.pipeline.run_sweep", return_value=0)
        assert m.main(["sweep", "--matrix", "a.txt"]) == 0
        run_sweep.assert_called_once()

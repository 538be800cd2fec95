import argparse
import logging
import os
import re
import signal
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from pydantic import BaseModel, ValidationError

from src.config import get_settings
from src.errors import CutTailError
from src.models.job import JobConfig
from src.repositories.output import ReportWriter
from src.services import pipeline

logging.basicConfig(
    level=os.getenv("LOG_LEVEL", "INFO"),
    format="%(asctime)s %(levelname)s %(name)s %(message)s",
)
logger = logging.getLogger(__name__)

_running = True

_SPECTRUM_VALUE = re.compile(r"-[\d.]")

RUNNERS: dict[str, Callable[[JobConfig], BaseModel]] = {
    "cut-tail": pipeline.run_cut_tail,
    "extremal": pipeline.run_extremal,
    "verify2d": pipeline.run_verify2d,
    "simulate": pipeline.run_simulate,
}


def _handle_signal(signum: int, _frame: object) -> None:
    global _running
    logger.info("Received signal %s, finishing running jobs", signum)
    _running = False


def _is_running() -> bool:
    return _running


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("input")
    source.add_argument("--matrix", type=Path, action="append", default=[], metavar="FILE")
    source.add_argument("--spectrum", metavar="STR", help='e.g. --spectrum="-0.3:2, -0.8+0.9i"')
    tol = common.add_argument_group("tolerances")
    tol.add_argument("--eps", type=float, default=settings.eps)
    tol.add_argument("--time-tol", type=float, default=settings.time_tol)
    tol.add_argument("--value-tol", type=float, default=settings.value_tol)
    tol.add_argument("--max-iter", type=int, default=settings.max_iter)
    run = common.add_argument_group("run")
    run.add_argument("--samples", type=int, default=settings.samples)
    run.add_argument("--horizon", type=float)
    run.add_argument("--seed", type=int, default=settings.seed)
    run.add_argument("--workers", type=int, default=settings.workers)
    out = common.add_argument_group("output")
    out.add_argument("--format", choices=["json-lines", "csv"], default=settings.format)
    out.add_argument("--plot", type=Path, metavar="DIR")
    out.add_argument("--no-timestamps", dest="timestamps", action="store_false")

    parser = argparse.ArgumentParser(
        prog="cuttail", description="Cut-tail points of linear ODE trajectories."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("cut-tail", parents=[common], help="T_cut of one matrix or spectrum")
    extremal = sub.add_parser("extremal", parents=[common], help="extremal value at one T")
    extremal.add_argument("--at", type=float, required=True, metavar="T")
    sub.add_parser("verify2d", parents=[common], help="cross-check T_cut in the plane")
    simulate = sub.add_parser("simulate", parents=[common], help="capped vs uncapped switching")
    simulate.add_argument("--budget", type=int, default=settings.budget)
    simulate.add_argument("--seeds", type=int, default=1)
    simulate.add_argument("--dwell-min", type=float, default=0.1)
    sub.add_parser("sweep", parents=[common], help="cut-tail over many --matrix files")
    return parser


def _attach_spectrum_values(argv: Sequence[str]) -> list[str]:
    """Rewrite `--spectrum -0.1+0.3i` as `--spectrum=-0.1+0.3i`; argparse reads it as a flag."""
    out: list[str] = []
    for token in argv:
        if out and out[-1] == "--spectrum" and _SPECTRUM_VALUE.match(token):
            out[-1] = f"--spectrum={token}"
        else:
            out.append(token)
    return out


def _job(args: argparse.Namespace) -> JobConfig:
    fields = {key: value for key, value in vars(args).items() if value is not None}
    fields["matrix"] = tuple(fields.get("matrix", ()))
    return JobConfig.model_validate(fields)


def main(argv: Sequence[str] | None = None) -> int:
    signal.signal(signal.SIGTERM, _handle_signal)
    signal.signal(signal.SIGINT, _handle_signal)

    try:
        parser = build_parser()
    except ValidationError as exc:
        for err in exc.errors():
            field = ".".join(str(part) for part in err["loc"])
            logger.error("invalid CUTTAIL_ setting %s: %s", field.upper(), err["msg"])
        return 2
    args = parser.parse_args(_attach_spectrum_values(sys.argv[1:] if argv is None else argv))
    try:
        cfg = _job(args)
    except ValidationError as exc:
        for err in exc.errors():
            logger.error("invalid arguments: %s", err["msg"])
        return 2

    writer = ReportWriter(sys.stdout, cfg.format)
    logger.info("cuttail %s starting: %s", cfg.command, cfg.source)
    if cfg.command == "sweep":
        return pipeline.run_sweep(cfg, writer, _is_running)
    try:
        report = RUNNERS[cfg.command](cfg)
    except (CutTailError, ValidationError) as exc:
        code = pipeline.exit_code_for(exc)
        logger.error("%s failed (%s): %s", cfg.command, type(exc).__name__, exc)
        writer.write(pipeline.error_report(cfg, exc))
        return code
    writer.write(report)
    logger.info("cuttail %s done", cfg.command)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Serializable job reports. Every emitted line re-parses into one of these."""

from __future__ import annotations

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from src.models.cuttail import CutTailResult
from src.models.exchange import ExtremalResult
from src.models.quasipoly import QuasiPolynomial
from src.models.spectrum import Spectrum
from src.models.switching import SearchResult


class _Report(BaseModel):
    model_config = ConfigDict(frozen=True)


class ComponentModel(_Report):
    alpha: float
    beta: float
    block: int


class CertificateModel(_Report):
    basis: list[str]
    coeffs: list[float]

    @classmethod
    def of(cls, p: QuasiPolynomial) -> CertificateModel:
        return cls(basis=p.basis.describe(), coeffs=[float(c) for c in p.coeffs])


class PredicateEvalModel(_Report):
    horizon: float
    lower: float
    upper: float
    inside: bool
    iterations: int


class LawModel(_Report):
    segments: list[tuple[str, float]]
    exponent: float
    seed: int


def spectrum_models(spectrum: Spectrum) -> list[ComponentModel]:
    return [ComponentModel(alpha=c.alpha, beta=c.beta, block=c.block) for c in spectrum]


class CutTailReport(_Report):
    command: Literal["cut-tail"] = "cut-tail"
    source: str
    spectrum: list[ComponentModel]
    dim_pa: int
    t_cut: float
    bracket: tuple[float, float]
    method: str
    degenerate: bool
    certificate: CertificateModel | None
    predicate_evals: list[PredicateEvalModel]
    wall_time: float | None = None
    timestamp: str | None = None

    @classmethod
    def of(cls, source: str, spectrum: Spectrum, result: CutTailResult) -> CutTailReport:
        return cls(
            source=source,
            spectrum=spectrum_models(spectrum),
            dim_pa=spectrum.dim_pa,
            t_cut=result.t_cut,
            bracket=result.bracket,
            method=result.method.value,
            degenerate=result.degenerate,
            certificate=CertificateModel.of(result.certificate) if result.certificate else None,
            predicate_evals=[
                PredicateEvalModel(
                    horizon=e.horizon,
                    lower=e.lower,
                    upper=e.upper,
                    inside=e.inside,
                    iterations=e.iterations,
                )
                for e in result.predicate_evals
            ],
        )


class ExtremalReport(_Report):
    command: Literal["extremal"] = "extremal"
    source: str
    spectrum: list[ComponentModel]
    dim_pa: int
    horizon: float
    value: float
    bounds: tuple[float, float]
    iterations: int
    active_points: list[float]
    certificate: CertificateModel
    wall_time: float | None = None
    timestamp: str | None = None

    @classmethod
    def of(cls, source: str, spectrum: Spectrum, result: ExtremalResult) -> ExtremalReport:
        return cls(
            source=source,
            spectrum=spectrum_models(spectrum),
            dim_pa=spectrum.dim_pa,
            horizon=result.horizon,
            value=result.value,
            bounds=result.bounds,
            iterations=result.iterations,
            active_points=list(result.active_points),
            certificate=CertificateModel.of(result.certificate),
        )


class Verify2dReport(_Report):
    command: Literal["verify2d"] = "verify2d"
    source: str
    spectrum: list[ComponentModel]
    t_exchange: float
    t_closed_form: float | None
    t_geometric: float
    horizon: float
    samples: int
    max_discrepancy: float
    wall_time: float | None = None
    timestamp: str | None = None


class SimulateReport(_Report):
    command: Literal["simulate"] = "simulate"
    source: str
    modes: list[str]
    t_cuts: list[float]
    dwell_min: list[float]
    horizon: float
    budget: int
    capped: LawModel
    uncapped: LawModel
    gap: float
    wall_time: float | None = None
    timestamp: str | None = None


class ErrorReport(_Report):
    command: Literal["error"] = "error"
    source: str
    error: str
    kind: str
    exit_code: int
    timestamp: str | None = None


def law_model(result: SearchResult, labels: list[str]) -> LawModel:
    return LawModel(
        segments=[(labels[i], d) for i, d in result.law.segments],
        exponent=result.exponent,
        seed=result.seed,
    )


AnyReport = Annotated[
    CutTailReport | ExtremalReport | Verify2dReport | SimulateReport | ErrorReport,
    Field(discriminator="command"),
]
REPORT_ADAPTER: TypeAdapter[AnyReport] = TypeAdapter(AnyReport)

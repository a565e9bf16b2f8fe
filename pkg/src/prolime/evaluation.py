"""Coefficient-mismatch metric and the paired sampler-comparison harness."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .core import FeatureVector, LimeHyperparameters, LocalSurrogate
from .explainer import ExplainRequest, ExplainStageError, explain
from .samplers import ProcessAwareSpec, RngStream, SamplerSpec, StandardSpec, cholesky
from .simulation import (
    FEATURE_NAMES,
    BenchmarkDistribution,
    GroundTruthBoundary,
    Quadrant,
    gaussian_pdf,
    ground_truth_for,
    oracle_model,
)

__all__ = [
    "CellFailure",
    "CellStats",
    "ExperimentConfig",
    "ExperimentReport",
    "MismatchResult",
    "coefficient_mismatch",
    "draw_test_point",
    "report_to_csv",
    "report_to_json",
    "run_experiment",
    "summary_table",
]

_SAMPLER_NAMES = ("standard", "process-aware")


@dataclass(frozen=True)
class MismatchResult:
    """Per-feature absolute gap between a surrogate and its local ground truth."""

    credit_mismatch: float
    risk_mismatch: float
    quadrant: Quadrant
    sample: FeatureVector | None = None

    def __post_init__(self) -> None:
        for value in (self.credit_mismatch, self.risk_mismatch):
            if not (math.isfinite(value) and value >= 0):
                raise ValueError("mismatches must be finite and nonnegative")


def coefficient_mismatch(
    surrogate: LocalSurrogate,
    truth: GroundTruthBoundary,
    sample: FeatureVector | None = None,
) -> MismatchResult:
    """Absolute per-feature coefficient differences; the intercept is ignored."""
    missing = [name for name in FEATURE_NAMES if name not in surrogate.feature_names]
    if missing:
        raise ValueError(f"surrogate lacks coefficients for {missing}")
    credit = abs(surrogate.coefficient("credit") - truth.credit_coef)
    risk = abs(surrogate.coefficient("risk") - truth.risk_coef)
    return MismatchResult(credit, risk, truth.quadrant, sample)


@dataclass(frozen=True)
class ExperimentConfig:
    """Deterministic description of a full sampler-comparison run."""

    master_seed: int
    trials: int = 100
    neighborhood_sizes: tuple[int, ...] = (1000, 5000)
    samplers: tuple[str, ...] = _SAMPLER_NAMES
    hyper: LimeHyperparameters = LimeHyperparameters()
    distribution: BenchmarkDistribution = BenchmarkDistribution()

    def __post_init__(self) -> None:
        object.__setattr__(self, "neighborhood_sizes", tuple(int(s) for s in self.neighborhood_sizes))
        object.__setattr__(self, "samplers", tuple(self.samplers))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.neighborhood_sizes:
            raise ValueError("at least one neighborhood size is required")
        if any(size < 2 for size in self.neighborhood_sizes):
            raise ValueError("neighborhood sizes must be at least 2")
        if not self.samplers:
            raise ValueError("at least one sampler is required")
        unknown = [s for s in self.samplers if s not in _SAMPLER_NAMES]
        if unknown:
            raise ValueError(f"unknown sampler name(s): {unknown}")
        if len(set(self.samplers)) != len(self.samplers):
            raise ValueError("sampler names must be unique")


@dataclass(frozen=True)
class CellStats:
    """Aggregated mismatch for one sampler at one neighborhood size."""

    sampler: str
    size: int
    credit_mean: float
    credit_std: float
    risk_mean: float
    risk_std: float
    trials: int


@dataclass(frozen=True)
class CellFailure:
    sampler: str
    size: int
    trial: int
    stage: str
    message: str


@dataclass(frozen=True)
class ExperimentReport:
    cells: tuple[CellStats, ...]
    failures: tuple[CellFailure, ...]
    master_seed: int
    trials: int
    samplers: tuple[str, ...]
    neighborhood_sizes: tuple[int, ...]
    hyper: LimeHyperparameters


def draw_test_point(dist: BenchmarkDistribution, rng: RngStream) -> FeatureVector:
    """One draw from the benchmark distribution, rejection-resampled until the
    density clears the oracle threshold so the local ground truth is defined."""
    lower = cholesky(dist.covariance)
    mean = np.asarray(dist.mean)
    gen = rng.generator()
    while True:
        point = FeatureVector(tuple((mean + lower @ gen.standard_normal(2)).tolist()), FEATURE_NAMES)
        if gaussian_pdf(point, dist) >= dist.density_threshold:
            return point


def _sampler_spec(name: str, config: ExperimentConfig) -> SamplerSpec:
    dist = config.distribution
    if name == "standard":
        scales = tuple(math.sqrt(dist.covariance[j][j]) for j in range(2))
        return StandardSpec(
            center_mode=config.hyper.center_mode,
            noise_mode=config.hyper.noise_mode,
            per_feature_scale=scales,
            training_mean=dist.mean,
        )
    return ProcessAwareSpec(mean=dist.mean, covariance=dist.covariance)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Paired comparison of samplers across neighborhood sizes.

    Every trial draws one fresh in-distribution test point and explains it
    once per (sampler, size) cell, so cells within a trial are paired.
    Stream layout: with ``cells`` combinations per trial, trial ``t`` draws
    its test point from stream ``t * (cells + 1)`` and cell ``j`` of that
    trial explains with stream ``t * (cells + 1) + 1 + j``, all under the
    master seed. The oracle model is seeded with the master seed as well.
    Mismatch means and population standard deviations aggregate the
    successful trials of each cell in trial order.
    """
    dist = config.distribution
    model = oracle_model(dist, model_seed=config.master_seed)
    specs = {name: _sampler_spec(name, config) for name in config.samplers}
    cells = [(name, size) for name in config.samplers for size in config.neighborhood_sizes]
    stride = len(cells) + 1
    values: dict[tuple[str, int], dict[str, list[float]]] = {
        cell: {"credit": [], "risk": []} for cell in cells
    }
    failures: list[CellFailure] = []
    for trial in range(config.trials):
        test_point = draw_test_point(dist, RngStream(config.master_seed, trial * stride))
        truth = ground_truth_for(test_point)
        for cell_index, (name, size) in enumerate(cells):
            stream = RngStream(config.master_seed, trial * stride + 1 + cell_index)
            request = ExplainRequest(
                sample=test_point,
                model=model,
                hyper=replace(config.hyper, neighborhood_size=size),
                sampler=specs[name],
                rng=stream,
            )
            try:
                explanation = explain(request)
            except ExplainStageError as exc:
                failures.append(CellFailure(name, size, trial, exc.stage, str(exc)))
                continue
            result = coefficient_mismatch(explanation.surrogate, truth, sample=test_point)
            values[(name, size)]["credit"].append(result.credit_mismatch)
            values[(name, size)]["risk"].append(result.risk_mismatch)
    stats = []
    for name, size in cells:
        credit = np.asarray(values[(name, size)]["credit"])
        risk = np.asarray(values[(name, size)]["risk"])
        if credit.size:
            stats.append(
                CellStats(
                    sampler=name,
                    size=size,
                    credit_mean=float(credit.mean()),
                    credit_std=float(credit.std()),
                    risk_mean=float(risk.mean()),
                    risk_std=float(risk.std()),
                    trials=int(credit.size),
                )
            )
        else:
            nan = float("nan")
            stats.append(CellStats(name, size, nan, nan, nan, nan, 0))
    return ExperimentReport(
        cells=tuple(stats),
        failures=tuple(failures),
        master_seed=config.master_seed,
        trials=config.trials,
        samplers=config.samplers,
        neighborhood_sizes=config.neighborhood_sizes,
        hyper=config.hyper,
    )


def _hyper_dict(hyper: LimeHyperparameters) -> dict:
    return {
        "neighborhood_size": hyper.neighborhood_size,
        "center_mode": hyper.center_mode.value,
        "noise_mode": hyper.noise_mode.value,
        "kernel_width": hyper.kernel_width,
        "distance": hyper.distance.value,
        "ridge_strength": hyper.ridge_strength,
        "explained_class": hyper.explained_class,
        "standardize_features": hyper.standardize_features,
    }


def report_to_csv(report: ExperimentReport) -> str:
    """CSV rows sampler,size,feature,mean,std,trials, preceded by comment
    lines that pin the master seed and the hyperparameter snapshot."""
    lines = [
        f"# master_seed={report.master_seed}",
        f"# trials={report.trials}",
        f"# hyperparameters={json.dumps(_hyper_dict(report.hyper))}",
        "sampler,size,feature,mean,std,trials",
    ]
    for cell in report.cells:
        lines.append(
            f"{cell.sampler},{cell.size},credit,{cell.credit_mean!r},{cell.credit_std!r},{cell.trials}"
        )
        lines.append(
            f"{cell.sampler},{cell.size},risk,{cell.risk_mean!r},{cell.risk_std!r},{cell.trials}"
        )
    return "\n".join(lines) + "\n"


def _json_number(value: float) -> float | None:
    return value if math.isfinite(value) else None


def report_to_json(report: ExperimentReport) -> str:
    document = {
        "master_seed": report.master_seed,
        "trials": report.trials,
        "hyperparameters": _hyper_dict(report.hyper),
        "samplers": list(report.samplers),
        "neighborhood_sizes": list(report.neighborhood_sizes),
        "cells": [
            {
                "sampler": cell.sampler,
                "size": cell.size,
                "credit": {"mean": _json_number(cell.credit_mean), "std": _json_number(cell.credit_std)},
                "risk": {"mean": _json_number(cell.risk_mean), "std": _json_number(cell.risk_std)},
                "trials": cell.trials,
            }
            for cell in report.cells
        ],
        "failures": [
            {
                "sampler": failure.sampler,
                "size": failure.size,
                "trial": failure.trial,
                "stage": failure.stage,
                "message": failure.message,
            }
            for failure in report.failures
        ],
    }
    return json.dumps(document, indent=2) + "\n"


def summary_table(report: ExperimentReport) -> str:
    """Fixed-width text summary, one row per (sampler, size) cell."""
    header = f"{'sampler':<15}{'size':>6}  {'credit (mean +/- std)':<24}{'risk (mean +/- std)':<24}{'trials':>6}"
    lines = [header]
    for cell in report.cells:
        credit = f"{cell.credit_mean:.4f} +/- {cell.credit_std:.4f}"
        risk = f"{cell.risk_mean:.4f} +/- {cell.risk_std:.4f}"
        lines.append(f"{cell.sampler:<15}{cell.size:>6}  {credit:<24}{risk:<24}{cell.trials:>6}")
    return "\n".join(lines)

"""Synthetic loan-approval benchmark.

A correlated bivariate Gaussian feature distribution over (credit, risk), a
diamond-shaped approval rule, an oracle classifier that is exact wherever the
feature density is non-negligible and coin-flips elsewhere, and the local
linear boundary associated with each Cartesian quadrant.
"""

from __future__ import annotations

import csv
import hashlib
import math
import struct
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import BlackBoxModel, ClassProbabilities, FeatureVector, LabeledSample, ModelEvaluationError
from .samplers import RngStream, cholesky

__all__ = [
    "BenchmarkDistribution",
    "DatasetFormatError",
    "FEATURE_NAMES",
    "GroundTruthBoundary",
    "OracleModel",
    "QUADRANT_BOUNDARIES",
    "Quadrant",
    "approval_label",
    "gaussian_pdf",
    "generate_dataset",
    "ground_truth_for",
    "oracle_model",
    "read_dataset_csv",
    "write_dataset_csv",
]

FEATURE_NAMES = ("credit", "risk")

_PROB_DENIED = ClassProbabilities((1.0, 0.0))
_PROB_APPROVED = ClassProbabilities((0.0, 1.0))


@dataclass(frozen=True)
class BenchmarkDistribution:
    """The benchmark's feature distribution and the oracle's density cutoff.

    Unit-variance features with a single correlation parameter, so the
    covariance is the correlation matrix [[1, rho], [rho, 1]].
    """

    mean: tuple[float, float] = (0.0, 0.0)
    covariance: tuple[tuple[float, float], tuple[float, float]] = ((1.0, -0.9), (-0.9, 1.0))
    density_threshold: float = 0.01

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean", tuple(float(m) for m in self.mean))
        cov = tuple(tuple(float(v) for v in row) for row in self.covariance)
        object.__setattr__(self, "covariance", cov)
        if len(self.mean) != 2 or len(cov) != 2 or any(len(row) != 2 for row in cov):
            raise ValueError("the benchmark distribution is bivariate")
        if cov[0][0] != 1.0 or cov[1][1] != 1.0:
            raise ValueError("features have unit variance; only the correlation varies")
        if cov[0][1] != cov[1][0]:
            raise ValueError("covariance must be symmetric")
        if not abs(cov[0][1]) < 1.0:
            raise ValueError("correlation magnitude must be below 1")
        if not self.density_threshold > 0:
            raise ValueError("density_threshold must be positive")

    @property
    def rho(self) -> float:
        return self.covariance[0][1]

    @classmethod
    def with_correlation(cls, rho: float, density_threshold: float = 0.01) -> "BenchmarkDistribution":
        return cls(covariance=((1.0, float(rho)), (float(rho), 1.0)), density_threshold=density_threshold)


class Quadrant(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


@dataclass(frozen=True)
class GroundTruthBoundary:
    """Linear boundary 0 = intercept + credit_coef*credit + risk_coef*risk."""

    quadrant: Quadrant
    intercept: float
    credit_coef: float
    risk_coef: float


QUADRANT_BOUNDARIES = {
    Quadrant.I: GroundTruthBoundary(Quadrant.I, 1.0, -1.0, -1.0),
    Quadrant.II: GroundTruthBoundary(Quadrant.II, 1.0, 1.0, -1.0),
    Quadrant.III: GroundTruthBoundary(Quadrant.III, 1.0, 1.0, 1.0),
    Quadrant.IV: GroundTruthBoundary(Quadrant.IV, 1.0, -1.0, 1.0),
}


def approval_label(credit: float, risk: float) -> int:
    """1 inside the diamond |credit+risk| < 1 and |credit-risk| < 1, else 0."""
    if abs(credit + risk) < 1.0 and abs(credit - risk) < 1.0:
        return 1
    return 0


def _diamond_mask(points: np.ndarray) -> np.ndarray:
    c = points[:, 0]
    r = points[:, 1]
    return (np.abs(c + r) < 1.0) & (np.abs(c - r) < 1.0)


def _pdf_values(points: np.ndarray, dist: BenchmarkDistribution) -> np.ndarray:
    rho = dist.rho
    det = 1.0 - rho * rho
    c = points[:, 0] - dist.mean[0]
    r = points[:, 1] - dist.mean[1]
    quad = (c * c - 2.0 * rho * c * r + r * r) / det
    return np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))


def gaussian_pdf(x: FeatureVector, dist: BenchmarkDistribution) -> float:
    """Exact density of the benchmark distribution at a point."""
    if x.dim != 2:
        raise ValueError("the benchmark density is bivariate")
    return float(_pdf_values(np.array([x.values]), dist)[0])


def generate_dataset(
    n: int,
    rng: RngStream,
    dist: BenchmarkDistribution = BenchmarkDistribution(),
) -> list[LabeledSample]:
    """Draw n labeled samples from the benchmark distribution."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    lower = cholesky(dist.covariance)
    gen = rng.generator()
    rows = np.asarray(dist.mean) + gen.standard_normal((n, 2)) @ lower.T
    labels = _diamond_mask(rows)
    return [
        LabeledSample(FeatureVector(tuple(row), FEATURE_NAMES), int(label))
        for row, label in zip(rows.tolist(), labels.tolist())
    ]


class OracleModel(BlackBoxModel):
    """Exact on-distribution, a per-point deterministic coin off-distribution.

    Wherever the feature density clears the threshold the model outputs the
    one-hot probabilities of the true diamond label. Elsewhere it outputs the
    one-hot of a fair coin that is a fixed function of (model seed, exact
    point coordinates), realized by hashing the seed with the coordinates'
    bit patterns. The model is therefore a deterministic function that still
    looks random across distinct far-out points.
    """

    n_classes = 2
    concurrency_safe = True

    def __init__(self, dist: BenchmarkDistribution, model_seed: int):
        self._dist = dist
        self._seed_bytes = struct.pack("<Q", int(model_seed) % 2**64)

    def _coin(self, credit: float, risk: float) -> int:
        payload = self._seed_bytes + struct.pack("<dd", credit, risk)
        return hashlib.blake2b(payload, digest_size=8).digest()[0] & 1

    def predict(self, x: FeatureVector) -> ClassProbabilities:
        return self.predict_batch([x])[0]

    def predict_batch(self, points: Sequence[FeatureVector]) -> list[ClassProbabilities]:
        for index, point in enumerate(points):
            if point.dim != 2:
                raise ModelEvaluationError(index, "expected a bivariate point")
        rows = np.array([p.values for p in points], dtype=float)
        densities = _pdf_values(rows, self._dist)
        in_diamond = _diamond_mask(rows)
        out: list[ClassProbabilities] = []
        for i in range(rows.shape[0]):
            if densities[i] >= self._dist.density_threshold:
                label = int(in_diamond[i])
            else:
                label = self._coin(rows[i, 0], rows[i, 1])
            out.append(_PROB_APPROVED if label == 1 else _PROB_DENIED)
        return out


def oracle_model(dist: BenchmarkDistribution, model_seed: int) -> BlackBoxModel:
    """The benchmark's black box; see :class:`OracleModel`."""
    return OracleModel(dist, model_seed)


def ground_truth_for(x: FeatureVector) -> GroundTruthBoundary:
    """Boundary of the Cartesian quadrant containing x; zeros count as positive."""
    if x.dim != 2:
        raise ValueError("ground truth is defined for bivariate points")
    credit, risk = x.values
    if credit >= 0.0:
        quadrant = Quadrant.I if risk >= 0.0 else Quadrant.IV
    else:
        quadrant = Quadrant.II if risk >= 0.0 else Quadrant.III
    return QUADRANT_BOUNDARIES[quadrant]


class DatasetFormatError(ValueError):
    """A dataset CSV line could not be parsed; carries the 1-based line number."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number


def write_dataset_csv(samples: Sequence[LabeledSample], path: str) -> None:
    """Write samples as CSV with header credit,risk,label, full float precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("credit,risk,label\n")
        for sample in samples:
            credit, risk = sample.x.values
            fh.write(f"{credit!r},{risk!r},{sample.y}\n")


def read_dataset_csv(path: str) -> list[LabeledSample]:
    """Read a dataset written by :func:`write_dataset_csv`."""
    samples: list[LabeledSample] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for line_number, row in enumerate(reader, start=1):
            if line_number == 1:
                if row != ["credit", "risk", "label"]:
                    raise DatasetFormatError(line_number, "expected header credit,risk,label")
                continue
            if len(row) != 3:
                raise DatasetFormatError(line_number, f"expected 3 columns, got {len(row)}")
            try:
                credit = float(row[0])
                risk = float(row[1])
                label = int(row[2])
            except ValueError as exc:
                raise DatasetFormatError(line_number, str(exc)) from exc
            try:
                samples.append(LabeledSample(FeatureVector((credit, risk), FEATURE_NAMES), label))
            except ValueError as exc:
                raise DatasetFormatError(line_number, str(exc)) from exc
    return samples

"""Shared domain types for local surrogate explanations."""

from __future__ import annotations

import abc
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BlackBoxModel",
    "CenterMode",
    "ClassProbabilities",
    "ConstantModel",
    "Distance",
    "Explanation",
    "FeatureVector",
    "LabeledSample",
    "LimeHyperparameters",
    "LocalSurrogate",
    "ModelEvaluationError",
    "NoiseMode",
    "default_kernel_width",
    "rank_features",
]


class CenterMode(Enum):
    """Where a standard perturbation neighborhood is centered."""

    SAMPLE = "sample"
    MEAN = "mean"


class NoiseMode(Enum):
    """Noise generator used by the standard perturbation sampler."""

    GAUSSIAN = "gaussian"
    LATIN_HYPERCUBE = "lhs"


class Distance(Enum):
    """Distance function used inside the proximity kernel."""

    EUCLIDEAN = "euclidean"


def default_kernel_width(n_features: int) -> float:
    """Default proximity-kernel width, 0.75 * sqrt(n_features)."""
    if n_features < 1:
        raise ValueError("n_features must be positive")
    return 0.75 * math.sqrt(n_features)


def _require_finite(values: Iterable[float], what: str) -> None:
    for value in values:
        if not math.isfinite(value):
            raise ValueError(f"{what} must be finite, got {value!r}")


@dataclass(frozen=True)
class FeatureVector:
    """An ordered, named point in feature space."""

    values: tuple[float, ...]
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))
        if len(self.values) == 0:
            raise ValueError("a feature vector needs at least one feature")
        if len(self.values) != len(self.feature_names):
            raise ValueError("values and feature_names must have equal length")
        _require_finite(self.values, "feature values")

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class LabeledSample:
    """A feature vector together with its binary outcome."""

    x: FeatureVector
    y: int

    def __post_init__(self) -> None:
        if self.y not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.y!r}")


@dataclass(frozen=True)
class ClassProbabilities:
    """Per-class probabilities; entries lie in [0, 1] and sum to 1."""

    p: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if not self.p:
            raise ValueError("at least one class probability is required")
        for value in self.p:
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"probability out of range: {value!r}")
        total = math.fsum(self.p)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")


class ModelEvaluationError(RuntimeError):
    """A model failed to produce probabilities for one point."""

    def __init__(self, index: int, message: str):
        super().__init__(f"model evaluation failed at point {index}: {message}")
        self.index = index


class BlackBoxModel(abc.ABC):
    """Opaque classifier contract: feature vector in, class probabilities out.

    Implementations set ``n_classes`` and declare through ``concurrency_safe``
    whether ``predict`` may be invoked from several threads at once.
    Predictions must be deterministic for identical inputs.
    """

    n_classes: int = 2
    concurrency_safe: bool = False

    @abc.abstractmethod
    def predict(self, x: FeatureVector) -> ClassProbabilities:
        raise NotImplementedError

    def predict_batch(self, points: Sequence[FeatureVector]) -> list[ClassProbabilities]:
        out: list[ClassProbabilities] = []
        for index, point in enumerate(points):
            try:
                out.append(self.predict(point))
            except ModelEvaluationError:
                raise
            except Exception as exc:
                raise ModelEvaluationError(index, str(exc)) from exc
        return out


class ConstantModel(BlackBoxModel):
    """Returns the same probabilities everywhere; useful as a null reference."""

    concurrency_safe = True

    def __init__(self, probabilities: Sequence[float]):
        self._output = ClassProbabilities(tuple(probabilities))
        self.n_classes = len(self._output.p)

    def predict(self, x: FeatureVector) -> ClassProbabilities:
        return self._output


@dataclass(frozen=True)
class LimeHyperparameters:
    """Knobs of the explanation pipeline.

    ``kernel_width`` defaults to the two-feature value of
    :func:`default_kernel_width`; pass an explicit width for other
    dimensionalities. ``standardize_features`` rescales the design matrix by
    the sampler's per-feature scale before fitting, so coefficients come out
    in standardized units; the proximity kernel always operates on raw units.
    """

    neighborhood_size: int = 1000
    center_mode: CenterMode = CenterMode.SAMPLE
    noise_mode: NoiseMode = NoiseMode.GAUSSIAN
    kernel_width: float = 0.75 * math.sqrt(2.0)
    distance: Distance = Distance.EUCLIDEAN
    ridge_strength: float = 1.0
    explained_class: int = 1
    standardize_features: bool = False

    def __post_init__(self) -> None:
        if self.neighborhood_size < 2:
            raise ValueError("neighborhood_size must be at least 2")
        if not self.kernel_width > 0:
            raise ValueError("kernel_width must be positive")
        if self.ridge_strength < 0:
            raise ValueError("ridge_strength must be nonnegative")
        if self.explained_class < 0:
            raise ValueError("explained_class must be a valid class index")


@dataclass(frozen=True)
class LocalSurrogate:
    """A fitted local linear model: intercept plus one coefficient per feature."""

    intercept: float
    coefficients: tuple[float, ...]
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))
        if len(self.coefficients) != len(self.feature_names):
            raise ValueError("coefficients and feature_names must have equal length")
        if not self.coefficients:
            raise ValueError("a surrogate needs at least one coefficient")
        _require_finite((self.intercept, *self.coefficients), "surrogate parameters")

    def coefficient(self, name: str) -> float:
        try:
            return self.coefficients[self.feature_names.index(name)]
        except ValueError:
            raise ValueError(f"unknown feature {name!r}") from None


def rank_features(surrogate: LocalSurrogate) -> list[tuple[str, float]]:
    """Order features by absolute coefficient, largest first.

    Ties keep the original feature order.
    """
    order = sorted(
        range(len(surrogate.coefficients)),
        key=lambda j: (-abs(surrogate.coefficients[j]), j),
    )
    return [(surrogate.feature_names[j], surrogate.coefficients[j]) for j in order]


@dataclass(frozen=True)
class Explanation:
    """The packaged result: explained sample, model output, ranked coefficients."""

    sample: FeatureVector
    predicted: ClassProbabilities
    surrogate: LocalSurrogate
    ranked_features: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        expected = tuple(rank_features(self.surrogate))
        if tuple(self.ranked_features) != expected:
            raise ValueError("ranked_features must equal rank_features(surrogate)")

    @classmethod
    def build(
        cls,
        sample: FeatureVector,
        predicted: ClassProbabilities,
        surrogate: LocalSurrogate,
    ) -> "Explanation":
        return cls(sample, predicted, surrogate, tuple(rank_features(surrogate)))

    def to_dict(self) -> dict:
        return {
            "sample": dict(zip(self.sample.feature_names, self.sample.values)),
            "predicted": list(self.predicted.p),
            "coefficients": dict(zip(self.surrogate.feature_names, self.surrogate.coefficients)),
            "ranked": [[name, value] for name, value in self.ranked_features],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

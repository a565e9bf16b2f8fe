"""Dependency-free SVG scatter plots for datasets, model grids, and neighborhoods."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .core import BlackBoxModel, FeatureVector, LabeledSample
from .samplers import Neighborhood

__all__ = [
    "plot_dataset",
    "plot_model_grid",
    "plot_neighborhood",
    "svg_scatter",
]

_WIDTH = 640
_HEIGHT = 640
_MARGIN = 56
_LABEL_COLORS = {0: "#e07a3f", 1: "#3566a8"}

Marker = tuple[float, float, float, str, float]


def svg_scatter(
    markers: Iterable[Marker],
    xlim: tuple[float, float] = (-4.0, 4.0),
    ylim: tuple[float, float] = (-4.0, 4.0),
    title: str = "",
    xlabel: str = "credit",
    ylabel: str = "risk",
) -> str:
    """Render circles at data coordinates inside a framed, ticked axis box.

    Each marker is (x, y, radius, fill, opacity); points outside the limits
    are omitted. Returns a complete standalone SVG document.
    """
    x0, x1 = xlim
    y0, y1 = ylim
    if not (x1 > x0 and y1 > y0):
        raise ValueError("axis limits must be increasing")
    inner_w = _WIDTH - 2 * _MARGIN
    inner_h = _HEIGHT - 2 * _MARGIN

    def px(x: float) -> float:
        return _MARGIN + (x - x0) / (x1 - x0) * inner_w

    def py(y: float) -> float:
        return _HEIGHT - _MARGIN - (y - y0) / (y1 - y0) * inner_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{inner_w}" height="{inner_h}" '
        f'fill="none" stroke="#444444" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2:.1f}" y="{_MARGIN - 22}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{title}</text>'
        )
    for tick in range(math.ceil(x0), math.floor(x1) + 1):
        x = px(tick)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_HEIGHT - _MARGIN}" x2="{x:.2f}" '
            f'y2="{_HEIGHT - _MARGIN + 6}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_HEIGHT - _MARGIN + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick}</text>'
        )
    for tick in range(math.ceil(y0), math.floor(y1) + 1):
        y = py(tick)
        parts.append(
            f'<line x1="{_MARGIN - 6}" y1="{y:.2f}" x2="{_MARGIN}" y2="{y:.2f}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{_MARGIN - 10}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick}</text>'
        )
    parts.append(
        f'<text x="{_WIDTH / 2:.1f}" y="{_HEIGHT - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_HEIGHT / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 16 {_HEIGHT / 2:.1f})">{ylabel}</text>'
    )
    for x, y, radius, fill, opacity in markers:
        if not (x0 <= x <= x1 and y0 <= y <= y1):
            continue
        parts.append(
            f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="{radius:.2f}" '
            f'fill="{fill}" fill-opacity="{opacity:.2f}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_dataset(samples: Sequence[LabeledSample], title: str = "benchmark dataset") -> str:
    """Scatter of a labeled dataset, colored by label."""
    markers = (
        (s.x.values[0], s.x.values[1], 2.4, _LABEL_COLORS[s.y], 0.75) for s in samples
    )
    return svg_scatter(markers, title=title)


def plot_model_grid(
    model: BlackBoxModel,
    resolution: int,
    limit: float = 3.0,
    title: str = "model predictions on a uniform grid",
) -> str:
    """Model predictions over a uniform grid, colored by the predicted class."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    axis = np.linspace(-limit, limit, resolution)
    points = [
        FeatureVector((float(cx), float(cy)), ("credit", "risk")) for cy in axis for cx in axis
    ]
    predictions = model.predict_batch(points)
    pad = 0.2
    span = (_WIDTH - 2 * _MARGIN) * (2 * limit) / (2 * limit + 2 * pad)
    radius = max(1.0, 0.45 * span / (resolution - 1))
    markers = []
    for point, probs in zip(points, predictions):
        label = max(range(len(probs.p)), key=probs.p.__getitem__)
        markers.append((point.values[0], point.values[1], radius, _LABEL_COLORS[label], 0.85))
    return svg_scatter(markers, xlim=(-limit - pad, limit + pad), ylim=(-limit - pad, limit + pad), title=title)


def plot_neighborhood(
    origin: FeatureVector,
    nbhd: Neighborhood,
    weights: Sequence[float],
    title: str = "sampled neighborhood",
) -> str:
    """Neighborhood points sized by proximity weight, with the origin on top."""
    points = list(nbhd.points)
    if len(points) != len(weights):
        raise ValueError("weights must match the neighborhood size")
    coords = [abs(v) for p in points for v in p.values] + [abs(v) for v in origin.values]
    limit = max(4.0, math.ceil(max(coords) + 0.5)) if coords else 4.0
    markers: list[Marker] = [
        (p.values[0], p.values[1], 1.0 + 4.0 * float(w), "#777777", 0.6)
        for p, w in zip(points, weights)
    ]
    markers.append((origin.values[0], origin.values[1], 6.0, "#c0392b", 1.0))
    return svg_scatter(markers, xlim=(-limit, limit), ylim=(-limit, limit), title=title)

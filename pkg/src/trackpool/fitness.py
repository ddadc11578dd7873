"""Fitness scoring of expert predictions.

Pairwise terms: O = exp(-(1-IoU)^2) per expert pair, averaged over the
current executives (self term included), with a fluctuation term against
per-pair temporal window means. Temporal aggregation uses geometrically
increasing weights rho^0..rho^(n-1), most recent largest. The self term
scores trajectory smoothness against the previous best box.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boxes import BoundingBox


@dataclass(frozen=True)
class FitnessBreakdown:
    """Per-expert, per-frame components of the combined fitness."""
    mean_overlap: float
    fluctuation: float
    pair_score: float
    smoothness: float
    self_score: float
    fitness: float


def overlap(a: BoundingBox, b: BoundingBox) -> float:
    """exp(-(1 - IoU)^2); 1 for identical boxes, exp(-1) when disjoint."""
    d = 1.0 - a.iou(b)
    return math.exp(-d * d)


def mean_overlap(overlaps: Sequence[float]) -> float:
    """Arithmetic mean of one expert's overlaps against all executives."""
    arr = np.asarray(overlaps, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("need at least one overlap term")
    return float(arr.mean())


def fluctuation(current: Sequence[float], window_means: Sequence[float]) -> float:
    """RMS deviation of current overlaps from their per-pair window means."""
    cur = np.asarray(current, dtype=np.float64)
    ref = np.asarray(window_means, dtype=np.float64)
    if cur.shape != ref.shape or cur.size == 0:
        raise ValueError("current and window means must align and be non-empty")
    d = cur - ref
    return float(np.sqrt((d * d).mean()))


def weighted_temporal_mean(series: Sequence[float], rho: float) -> float:
    """Weighted mean with weights rho^0..rho^(n-1), newest value weighted most."""
    arr = np.asarray(series, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty series")
    if rho <= 0:
        raise ValueError("rho must be positive")
    w = rho ** np.arange(arr.size)
    return float((w * arr).sum() / w.sum())


def pair_score(mean_bar: float, fluct_bar: float, epsilon: float) -> float:
    """Consistency-over-volatility ratio M / (V + epsilon)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if fluct_bar < 0:
        raise ValueError("fluctuation must be non-negative")
    return mean_bar / (fluct_bar + epsilon)


def smoothness(prev_best: BoundingBox, current: BoundingBox) -> float:
    """exp(-d^2 / (2 sigma^2)) with sigma = (w + h)/2 of the current box."""
    sigma = (current.w + current.h) / 2.0
    d = prev_best.center_distance(current)
    return math.exp(-(d * d) / (2.0 * sigma * sigma))


def self_score(series: Sequence[float], rho: float) -> float:
    """Temporal smoothness: weighted mean of recent smoothness values."""
    return weighted_temporal_mean(series, rho)


def combine_fitness(r_pair: float, r_self: float, mu: float) -> float:
    """mu * pair score + (1 - mu) * self score."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must be in [0, 1]")
    return mu * r_pair + (1.0 - mu) * r_self

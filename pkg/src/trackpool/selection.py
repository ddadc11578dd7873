"""Executive selection: fitness bookkeeping and roulette sampling.

The ledger owns every expert's running fitness plus the bounded histories
the fitness formulas need. Only experts scored in a frame are touched, so a
non-executive expert's fitness is frozen bit-for-bit.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import fitness as fit
from .boxes import BoundingBox
from .errors import InvariantError

POOL_SIZE = 63


def selection_probabilities(values: Sequence[float]) -> np.ndarray:
    """Fitness-proportional probabilities; uniform fallback when all are zero."""
    f = np.asarray(values, dtype=np.float64)
    if f.size == 0:
        raise ValueError("empty fitness vector")
    if (f < 0).any():
        raise InvariantError("negative fitness")
    total = f.sum()
    if total <= 0.0:
        return np.full(f.size, 1.0 / f.size)
    return f / total


def select_executives(probs: Sequence[float], count: int,
                      rng: np.random.Generator) -> list:
    """Roulette sampling without replacement; renormalizes after each draw.

    Once only zero-probability entries remain they are drawn uniformly, so
    count equal to the pool size always returns every index. Returns sorted
    indices.
    """
    p = np.asarray(probs, dtype=np.float64).copy()
    n = p.size
    if not 1 <= count <= n:
        raise ValueError(f"count must be in 1..{n}, got {count}")
    if (p < 0).any():
        raise InvariantError("negative probability")
    chosen = []
    for _ in range(count):
        total = p.sum()
        if total <= 0.0:
            remaining = [i for i in range(n) if i not in chosen]
            idx = remaining[min(int(rng.random() * len(remaining)),
                                len(remaining) - 1)]
        else:
            r = rng.random() * total
            c = np.cumsum(p)
            idx = int(np.searchsorted(c, r, side="right"))
            if idx >= n or p[idx] == 0.0:
                idx = int(np.flatnonzero(p)[-1])  # guard against float spill
        chosen.append(idx)
        p[idx] = 0.0
    return sorted(chosen)


@dataclass
class SelectionConfig:
    executive_count: int = 28
    window: int = 5
    rho: float = 1.1
    mu: float = 0.5
    epsilon: float = 1e-6
    include_self_overlap: bool = True


class FitnessLedger:
    """Running fitness and bounded histories for a pool of experts."""

    def __init__(self, pool_size: int, config: SelectionConfig):
        if pool_size < 1:
            raise ValueError("pool must not be empty")
        if config.window < 1:
            raise ValueError("window must be >= 1")
        self.config = config
        self.pool_size = pool_size
        self.fitness = np.ones(pool_size, dtype=np.float64)
        cap = config.window
        self._pair_hist = {}  # (lo, hi) -> deque of overlap values
        self._mean_hist = [deque(maxlen=cap) for _ in range(pool_size)]
        self._fluct_hist = [deque(maxlen=cap) for _ in range(pool_size)]
        self._smooth_hist = [deque(maxlen=cap) for _ in range(pool_size)]
        self.executive_flags = []  # per recorded frame: bitmask of pool indices

    def probabilities(self) -> np.ndarray:
        return selection_probabilities(self.fitness)

    def _pair(self, i: int, j: int) -> deque:
        key = (i, j) if i < j else (j, i)
        d = self._pair_hist.get(key)
        if d is None:
            d = deque(maxlen=self.config.window)
            self._pair_hist[key] = d
        return d

    def record_frame(self, executives: Sequence[int],
                     boxes: Mapping[int, BoundingBox],
                     prev_best: BoundingBox) -> dict:
        """Score one frame's executives; returns per-index FitnessBreakdown."""
        exe = sorted(set(executives))
        if not exe:
            raise ValueError("no executives to score")
        cfg = self.config
        k = len(exe)

        # pairwise overlaps of this frame, self terms on the diagonal
        omat = np.ones((k, k), dtype=np.float64)
        for a in range(k):
            for b in range(a + 1, k):
                o = fit.overlap(boxes[exe[a]], boxes[exe[b]])
                omat[a, b] = omat[b, a] = o
                self._pair(exe[a], exe[b]).append(o)

        out = {}
        for a, n in enumerate(exe):
            include = [b for b in range(k) if cfg.include_self_overlap or b != a]
            if not include:  # ablation switch with a single executive
                current = [1.0]
                means = [1.0]
            else:
                current = [omat[a, b] for b in include]
                means = [1.0 if b == a else
                         float(np.mean(self._pair(n, exe[b])))
                         for b in include]
            m = fit.mean_overlap(current)
            v = fit.fluctuation(current, means)
            self._mean_hist[n].append(m)
            self._fluct_hist[n].append(v)
            m_bar = fit.weighted_temporal_mean(self._mean_hist[n], cfg.rho)
            v_bar = fit.weighted_temporal_mean(self._fluct_hist[n], cfg.rho)
            r_pair = fit.pair_score(m_bar, v_bar, cfg.epsilon)

            s = fit.smoothness(prev_best, boxes[n])
            self._smooth_hist[n].append(s)
            r_self = fit.self_score(self._smooth_hist[n], cfg.rho)

            r = fit.combine_fitness(r_pair, r_self, cfg.mu)
            if r < 0:
                raise InvariantError(f"negative fitness {r} for expert index {n}")
            self.fitness[n] = r
            out[n] = fit.FitnessBreakdown(
                mean_overlap=m, fluctuation=v, pair_score=r_pair,
                smoothness=s, self_score=r_self, fitness=r)

        self.executive_flags.append(sum(1 << i for i in exe))
        return out


def pick_best(ledger: FitnessLedger, executives: Sequence[int],
              boxes: Mapping[int, BoundingBox]) -> tuple:
    """Highest-fitness executive and its box; ties go to the smallest index."""
    exe = sorted(set(executives))
    if not exe:
        raise ValueError("no executives")
    best = min(exe, key=lambda i: (-ledger.fitness[i], i))
    return best, boxes[best]

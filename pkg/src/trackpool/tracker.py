"""Run orchestration: config, per-frame loop, and the run record.

Frame 1 trains every expert on the ground-truth box. Each later frame:
select executives (all of them during the cold-start window, otherwise
roulette over fitness-proportional probabilities), predict each executive
from the previous best box, score fitness, pick the winner, then train each
executive on its own predicted box. Non-executives are never touched.

Randomness comes from one PCG64 stream seeded by the config; the only
consumer is roulette selection, so equal seeds give bit-identical runs.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .boxes import BoundingBox
from .dcf import make_gaussian_label
from .errors import ConfigError, NotFoundError
from .experts import (Expert, ExpertId, TrackContext, enumerate_pool, predict,
                      train_expert)
from .features import ChannelMapSource, FeatureSource, SyntheticSource
from .fitness import FitnessBreakdown
from .scale import ScaleFilter
from .selection import (FitnessLedger, SelectionConfig, pick_best,
                        select_executives)
from .sequences import SequenceSpec

MODES = ("adaptive", "all-experts")


@dataclass
class RunConfig:
    """Tracker settings; file keys are exactly these field names."""
    regularization: float = 1e-4
    learning_rate: float = 0.01
    sigma_factor: float = 0.1
    padding: float = 2.0
    cell_size: int = 4
    executive_count: int = 28
    fitness_window: int = 5
    rho: float = 1.1
    mu: float = 0.5
    epsilon: float = 1e-6
    scale_count: int = 33
    scale_step: float = 1.02
    scale_learning_rate: float = 0.025
    color_mask: bool = True
    color_bins: int = 32
    features: str = "synthetic"
    mode: str = "adaptive"
    seed: int = 0

    def validate(self) -> "RunConfig":
        if self.regularization < 0:
            raise ConfigError("regularization must be >= 0")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ConfigError("learning_rate must be in (0, 1]")
        if self.sigma_factor <= 0:
            raise ConfigError("sigma_factor must be positive")
        if self.padding <= 1.0:
            raise ConfigError("padding must exceed 1")
        if self.cell_size < 1:
            raise ConfigError("cell_size must be >= 1")
        if not 1 <= self.executive_count <= 63:
            raise ConfigError("executive_count must be in 1..63")
        if self.fitness_window < 1:
            raise ConfigError("fitness_window must be >= 1")
        if self.rho <= 1.0:
            raise ConfigError("rho must exceed 1")
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigError("mu must be in [0, 1]")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.scale_count < 1:
            raise ConfigError("scale_count must be >= 1")
        if self.scale_count > 1 and self.scale_step <= 1.0:
            raise ConfigError("scale_step must exceed 1")
        if not 0.0 < self.scale_learning_rate <= 1.0:
            raise ConfigError("scale_learning_rate must be in (0, 1]")
        if self.color_bins < 2:
            raise ConfigError("color_bins must be >= 2")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if not self.features:
            raise ConfigError("features must be 'synthetic' or a channel-map path")
        return self

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        return cls.from_text(p.read_text())

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        kwargs = {}
        types = {f.name: type(f.default) for f in fields(cls)}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line {lineno}: expected key=value")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in types:
                raise ConfigError(f"config line {lineno}: unknown key {key!r}")
            t = types[key]
            try:
                if t is bool:
                    if val.lower() not in ("true", "false", "on", "off", "1", "0"):
                        raise ValueError
                    kwargs[key] = val.lower() in ("true", "on", "1")
                else:
                    kwargs[key] = t(val)
            except ValueError:
                raise ConfigError(
                    f"config line {lineno}: bad value {val!r} for {key!r}") from None
        return cls(**kwargs).validate()

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    def to_file(self, path):
        Path(path).write_text(self.to_text())

    def with_overrides(self, **kwargs) -> "RunConfig":
        clean = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **clean).validate()


@dataclass
class FrameRecord:
    """One frame of a run: winning box plus who ran and who won."""
    index: int                    # 1-based frame number
    box: BoundingBox
    executives: int               # bitmask over canonical expert masks
    winner: int                   # winning expert's 6-bit mask; 0 at init
    wall_ms: float = 0.0
    breakdowns: Dict[int, FitnessBreakdown] = field(default_factory=dict)


@dataclass
class RunRecord:
    sequence: str
    config: RunConfig
    frames: List[FrameRecord] = field(default_factory=list)

    @property
    def boxes(self) -> list:
        return [f.box for f in self.frames]

    def results_rows(self) -> list:
        """Deterministic per-frame rows (no timings) for the results CSV."""
        rows = []
        for f in self.frames:
            b = f.box
            rows.append((f.index, b.cx, b.cy, b.w, b.h, f.winner, f.executives))
        return rows


def _executives_mask(ids: Sequence[ExpertId]) -> int:
    return sum(1 << (e.mask - 1) for e in ids)


def build_source(config: RunConfig) -> FeatureSource:
    if config.features == "synthetic":
        return SyntheticSource(config.cell_size)
    path = Path(config.features)
    if not path.is_file():
        raise NotFoundError(f"channel-map file not found: {path}")
    return ChannelMapSource.open(path, config.cell_size)


class PoolTracker:
    """Stateful tracker over a pool of experts (full 63 by default)."""

    def __init__(self, config: RunConfig, pool: Optional[Sequence[ExpertId]] = None,
                 source: Optional[FeatureSource] = None):
        self.config = config.validate()
        self.pool = list(pool) if pool is not None else enumerate_pool()
        if not self.pool:
            raise ValueError("expert pool must not be empty")
        if len(set(self.pool)) != len(self.pool):
            raise ValueError("duplicate expert ids in pool")
        if config.executive_count > len(self.pool):
            raise ConfigError(f"executive_count {config.executive_count} exceeds "
                              f"pool size {len(self.pool)}")
        self.rng = np.random.Generator(np.random.PCG64(config.seed))
        self.source = source if source is not None else build_source(config)
        self.ledger = FitnessLedger(len(self.pool), SelectionConfig(
            executive_count=config.executive_count, window=config.fitness_window,
            rho=config.rho, mu=config.mu, epsilon=config.epsilon))
        self.experts: List[Expert] = []
        self.ctx: Optional[TrackContext] = None
        self.best_box: Optional[BoundingBox] = None
        self.frame_no = 0

    def _make_scale_filter(self) -> Optional[ScaleFilter]:
        return ScaleFilter(self.config.scale_count, self.config.scale_step,
                           learning_rate=self.config.scale_learning_rate)

    def start(self, image: np.ndarray, gt_box: BoundingBox) -> FrameRecord:
        """Frame 1: build geometry and train the whole pool on the truth box."""
        cfg = self.config
        cell = cfg.cell_size
        grid_h = max(4, int(gt_box.h * cfg.padding) // cell)
        grid_w = max(4, int(gt_box.w * cfg.padding) // cell)
        label = make_gaussian_label(grid_h, grid_w, gt_box.h / cell,
                                    gt_box.w / cell, cfg.sigma_factor)
        self.ctx = TrackContext(
            source=self.source, label=label, grid=(grid_h, grid_w),
            tmpl=(grid_h * cell, grid_w * cell), cell_size=cell,
            padding=cfg.padding, lam=cfg.regularization, eta=cfg.learning_rate,
            use_color_mask=cfg.color_mask, color_bins=cfg.color_bins)
        self.ctx.begin_frame(0, image)

        self.experts = [Expert(eid, self._make_scale_filter(),
                               history=max(cfg.fitness_window, 8))
                        for eid in self.pool]
        t0 = time.perf_counter()
        for ex in self.experts:
            train_expert(ex, self.ctx, gt_box)
            ex.bbox_history.append((1, gt_box))
        self.best_box = gt_box
        self.frame_no = 1
        return FrameRecord(index=1, box=gt_box,
                           executives=_executives_mask(self.pool), winner=0,
                           wall_ms=(time.perf_counter() - t0) * 1e3)

    def _select(self) -> list:
        """Executive pool indices for the upcoming frame."""
        n = len(self.pool)
        if self.config.mode == "all-experts":
            return list(range(n))
        if self.frame_no + 1 <= self.config.fitness_window:
            return list(range(n))  # cold start: everyone runs
        if self.config.executive_count >= n:
            return list(range(n))
        return select_executives(self.ledger.probabilities(),
                                 self.config.executive_count, self.rng)

    def step(self, image: np.ndarray) -> FrameRecord:
        """Track one frame; returns its record."""
        if self.ctx is None:
            raise RuntimeError("start() must run before step()")
        t0 = time.perf_counter()
        exe = self._select()
        self.frame_no += 1
        self.ctx.begin_frame(self.frame_no - 1, image)

        boxes = {}
        for i in exe:
            boxes[i] = predict(self.experts[i], self.ctx, self.best_box)
        breakdowns = self.ledger.record_frame(exe, boxes, self.best_box)
        win_idx, win_box = pick_best(self.ledger, exe, boxes)
        for i in exe:
            train_expert(self.experts[i], self.ctx, boxes[i])
            self.experts[i].bbox_history.append((self.frame_no, boxes[i]))
        self.best_box = win_box

        return FrameRecord(
            index=self.frame_no, box=win_box,
            executives=_executives_mask([self.experts[i].id for i in exe]),
            winner=self.experts[win_idx].id.mask,
            wall_ms=(time.perf_counter() - t0) * 1e3,
            breakdowns={self.experts[i].id.mask: breakdowns[i] for i in exe})


def run_tracker(config: RunConfig, sequence: SequenceSpec,
                pool: Optional[Sequence[ExpertId]] = None) -> RunRecord:
    """Track a whole sequence from its first ground-truth box."""
    if len(sequence) < 1:
        raise ValueError("empty sequence")
    tracker = PoolTracker(config, pool)
    record = RunRecord(sequence=sequence.name, config=config)
    record.frames.append(tracker.start(sequence.frame(0), sequence.boxes[0]))
    for i in range(1, len(sequence)):
        record.frames.append(tracker.step(sequence.frame(i)))
    return record

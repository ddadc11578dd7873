"""Tracking experts: one correlation filter per subscribed feature kind.

An expert is identified by a non-empty subset of the six feature kinds,
encoded canonically as a 6-bit mask (bit 0 = HOG). The full pool is all 63
non-empty subsets in ascending mask order. Member responses are fused with
uniform weights; a per-expert 1-D scale filter refines the box size.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boxes import BoundingBox, PatchSpec
from .dcf import (FeatureStack, GaussianLabel, ResponseMap, apply_hann, respond,
                  respond_spectrum, train_filter, update_model, wrap_displacement)
from .errors import TrackingError
from .features import FeatureKind, FeatureSource, color_mask
from .grids import resize_grid, to_gray
from .scale import ScaleFilter

POOL_BITS = 6
POOL_SIZE = (1 << POOL_BITS) - 1


@dataclass(frozen=True, order=True)
class ExpertId:
    """Canonical identity: 6-bit mask over FeatureKind values, 1..63."""
    mask: int

    def __post_init__(self):
        if not 1 <= self.mask <= POOL_SIZE:
            raise ValueError(f"expert mask must be in 1..{POOL_SIZE}, got {self.mask}")

    @property
    def kinds(self) -> tuple:
        return tuple(k for k in FeatureKind if self.mask & k.bit)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    def __str__(self):
        return "+".join(k.name for k in self.kinds)


def enumerate_pool() -> list:
    """All 63 experts in canonical ascending-mask order."""
    return [ExpertId(m) for m in range(1, POOL_SIZE + 1)]


class Expert:
    """Mutable tracking state owned by the tracker loop."""

    def __init__(self, eid: ExpertId, scale_filter: Optional[ScaleFilter] = None,
                 history: int = 8):
        self.id = eid
        self.models = {}  # FeatureKind -> FilterModel
        self.scale = scale_filter
        self.bbox_history = deque(maxlen=history)
        self.last_trained_frame = -1

    def __repr__(self):
        return f"Expert({self.id})"


def fuse_responses(maps: Sequence[ResponseMap], weights: Sequence[float]) -> ResponseMap:
    """Normalized weighted sum of equally-shaped response grids."""
    if len(maps) == 0:
        raise ValueError("nothing to fuse")
    if len(weights) != len(maps):
        raise ValueError("one weight per map required")
    w = np.asarray(weights, dtype=np.float64)
    if (w < 0).any() or w.sum() <= 0:
        raise ValueError("weights must be non-negative with positive sum")
    shape = maps[0].grid.shape
    for m in maps[1:]:
        if m.grid.shape != shape:
            raise ValueError("response grids differ in shape")
    w = w / w.sum()
    grid = np.zeros(shape)
    for wi, m in zip(w, maps):
        grid += wi * m.grid
    return ResponseMap(grid)


@dataclass
class TrackContext:
    """Per-run geometry plus per-frame image state shared by all experts."""
    source: FeatureSource
    label: GaussianLabel
    grid: tuple     # feature grid (rows, cols)
    tmpl: tuple     # template pixel size (rows, cols)
    cell_size: int
    padding: float
    lam: float
    eta: float
    use_color_mask: bool = True
    color_bins: int = 32
    frame_index: int = 0
    image: np.ndarray = None
    gray: np.ndarray = None
    caches: dict = field(default_factory=dict)

    def begin_frame(self, frame_index: int, image: np.ndarray):
        self.frame_index = frame_index
        self.image = image
        self.gray = to_gray(image)
        self.caches = {}

    @property
    def image_size(self) -> tuple:
        h, w = self.image.shape[:2]
        return w, h


def _windowed_spectra(ctx: TrackContext, patch: PatchSpec, kinds) -> dict:
    """Hann-windowed candidate stacks and their spectra, shared across experts."""
    stacks = ctx.source.stacks(ctx.image, ctx.frame_index, patch, kinds,
                               ctx.grid, ctx.tmpl)
    cache = ctx.caches.setdefault("predict_fft", {})
    out = {}
    for kind in kinds:
        key = (kind, patch.cx, patch.cy, patch.width, patch.height)
        got = cache.get(key)
        if got is None:
            windowed = apply_hann(stacks[kind])
            got = np.fft.fft2(windowed.data, axes=(-2, -1))
            cache[key] = got
        out[kind] = got
    return out


def predict(expert: Expert, ctx: TrackContext, prev_box: BoundingBox) -> BoundingBox:
    """Locate the target near prev_box; translation first, then scale.

    A flat response yields zero displacement (peak at the zero-shift bin), so
    featureless frames return the previous box unmoved.
    """
    if not expert.models:
        raise ValueError(f"expert {expert.id} has no trained models")
    img_w, img_h = ctx.image_size
    if not (0 <= prev_box.cx < img_w and 0 <= prev_box.cy < img_h):
        raise TrackingError(f"search center {prev_box.cx, prev_box.cy} "
                            f"outside {img_w}x{img_h} image")
    patch = PatchSpec.around(prev_box, ctx.padding)
    spectra = _windowed_spectra(ctx, patch, expert.id.kinds)
    maps = [respond_spectrum(expert.models[k], spectra[k]) for k in expert.id.kinds]
    fused = fuse_responses(maps, [1.0] * len(maps))
    dr, dc = wrap_displacement(fused.peak_position, ctx.grid)
    cx = prev_box.cx + dc * (patch.width / ctx.grid[1])
    cy = prev_box.cy + dr * (patch.height / ctx.grid[0])

    mult = 1.0
    if expert.scale is not None and expert.scale.trained:
        mult = expert.scale.locate(ctx.gray, cx, cy, prev_box.w, prev_box.h,
                                   ctx.caches.setdefault("scale", {}))
    box = BoundingBox(cx, cy, prev_box.w * mult, prev_box.h * mult)
    return box.clamped(img_w, img_h)


def _training_stacks(ctx: TrackContext, box: BoundingBox, kinds) -> dict:
    """Masked, windowed training stacks for a located box, cached per frame."""
    patch = PatchSpec.around(box, ctx.padding)
    stacks = ctx.source.stacks(ctx.image, ctx.frame_index, patch, kinds,
                               ctx.grid, ctx.tmpl)
    mask_grid = None
    if ctx.use_color_mask:
        cache = ctx.caches.setdefault("mask", {})
        key = (box.cx, box.cy, box.w, box.h)
        mask_grid = cache.get(key)
        if mask_grid is None:
            mask = color_mask(ctx.image, patch, box, ctx.color_bins)
            mask_grid = resize_grid(mask.grid, ctx.grid[0], ctx.grid[1])
            cache[key] = mask_grid
    cache = ctx.caches.setdefault("train_stack", {})
    out = {}
    for kind in kinds:
        key = (kind, box.cx, box.cy, box.w, box.h)
        got = cache.get(key)
        if got is None:
            data = stacks[kind].data
            if mask_grid is not None:
                data = data * mask_grid[None, :, :]
            got = apply_hann(FeatureStack(data))
            cache[key] = got
        out[kind] = got
    return out


def train_expert(expert: Expert, ctx: TrackContext, box: BoundingBox) -> Expert:
    """Train or update every member filter (and the scale filter) at a box."""
    prepared = _training_stacks(ctx, box, expert.id.kinds)
    for kind in expert.id.kinds:
        model = expert.models.get(kind)
        if model is None:
            expert.models[kind] = train_filter(prepared[kind], ctx.label, ctx.lam)
        else:
            expert.models[kind] = update_model(model, prepared[kind], ctx.label,
                                               ctx.eta)
    if expert.scale is not None:
        expert.scale.update(ctx.gray, box.cx, box.cy, box.w, box.h,
                            ctx.caches.setdefault("scale", {}))
    expert.last_trained_frame = ctx.frame_index
    return expert

"""Feature extraction: kinds, extractors, and per-frame feature sources."""
from __future__ import annotations

import numpy as np

from .. import grids
from ..boxes import PatchSpec
from ..dcf import FeatureStack
from .channel_maps import ChannelMapFile, load_channel_map, write_channel_maps
from .color import ColorMask, color_mask
from .hog import extract_hog, hog_features
from .kinds import ALL_KINDS, FeatureKind
from .synthetic import BLUR_RADIUS, CHANNEL_COUNT, pyramid_stack, synth_features

__all__ = [
    "ALL_KINDS", "BLUR_RADIUS", "CHANNEL_COUNT", "ChannelMapFile", "ColorMask",
    "FeatureKind", "FeatureSource", "ChannelMapSource", "SyntheticSource",
    "color_mask", "extract_hog", "hog_features", "load_channel_map",
    "pyramid_stack", "synth_features", "write_channel_maps",
]


class FeatureSource:
    """Produces per-kind feature stacks for image patches, cached per frame.

    Callers pass the template pixel size the patch should be resampled to and
    the feature-grid size; entries are memoized for the current frame only.
    """

    def __init__(self, cell_size: int = 4):
        self.cell_size = cell_size
        self._frame_index = None
        self._cache = {}

    def _begin(self, frame_index: int):
        if frame_index != self._frame_index:
            self._frame_index = frame_index
            self._cache = {}

    def _patch_pixels(self, image: np.ndarray, patch: PatchSpec, tmpl: tuple):
        key = ("pix", patch.cx, patch.cy, patch.width, patch.height, tmpl)
        got = self._cache.get(key)
        if got is None:
            img = np.asarray(image)
            scale = 255.0 if img.dtype == np.uint8 else 1.0
            got = grids.extract_patch(img, patch.cx, patch.cy,
                                      patch.width, patch.height,
                                      tmpl[0], tmpl[1]) / scale
            self._cache[key] = got
        return got

    def stacks(self, image: np.ndarray, frame_index: int, patch: PatchSpec,
               kinds, grid: tuple, tmpl: tuple) -> dict:
        """Feature stacks (one per requested kind) on the common grid."""
        self._begin(frame_index)
        out = {}
        for kind in kinds:
            key = (kind, patch.cx, patch.cy, patch.width, patch.height, grid)
            got = self._cache.get(key)
            if got is None:
                got = self._compute(image, frame_index, patch, kind, grid, tmpl)
                self._cache[key] = got
            out[kind] = got
        return out

    def _compute(self, image, frame_index, patch, kind, grid, tmpl) -> FeatureStack:
        raise NotImplementedError


class SyntheticSource(FeatureSource):
    """Live extraction: HOG from pixels, blurred-luminance pyramids elsewhere."""

    def _compute(self, image, frame_index, patch, kind, grid, tmpl):
        pix = self._patch_pixels(image, patch, tmpl)
        if kind is FeatureKind.HOG:
            return hog_features(pix, self.cell_size)
        return pyramid_stack(pix, kind, grid[0], grid[1])


class ChannelMapSource(FeatureSource):
    """Deep kinds cropped from a channel-map file; HOG still computed live."""

    def __init__(self, file: ChannelMapFile, cell_size: int = 4):
        super().__init__(cell_size)
        self.file = file

    @classmethod
    def open(cls, path, cell_size: int = 4) -> "ChannelMapSource":
        return cls(ChannelMapFile.read(path), cell_size)

    def _compute(self, image, frame_index, patch, kind, grid, tmpl):
        if kind is FeatureKind.HOG:
            return hog_features(self._patch_pixels(image, patch, tmpl),
                                self.cell_size)
        rect = (patch.cy - patch.height / 2.0, patch.cx - patch.width / 2.0,
                patch.cy + patch.height / 2.0, patch.cx + patch.width / 2.0)
        stack = self.file.patch_stack(kind, frame_index, rect,
                                      np.asarray(image).shape, grid)
        data = stack.data - stack.data.mean(axis=(1, 2), keepdims=True)
        return FeatureStack(data)

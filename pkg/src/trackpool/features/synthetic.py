"""Deterministic stand-ins for deep convolutional feature maps.

Kind of depth k yields 2+k channels of box-blurred luminance with blur radii
k .. k+channels-1, so deeper kinds are strictly blurrier (coarser structure),
mirroring how later convolutional layers trade detail for invariance. HOG
requests route to the real 31-channel extractor.
"""
from __future__ import annotations

import numpy as np

from .. import grids
from ..boxes import PatchSpec
from ..dcf import FeatureStack
from .hog import extract_hog, hog_features
from .kinds import FeatureKind

BLUR_RADIUS = {k: k.depth for k in FeatureKind if k is not FeatureKind.HOG}
CHANNEL_COUNT = {k: 2 + k.depth for k in FeatureKind if k is not FeatureKind.HOG}


def pyramid_stack(pixels: np.ndarray, kind: FeatureKind,
                  out_h: int, out_w: int) -> FeatureStack:
    """Blurred-luminance pyramid of a patch, resampled to the requested grid.

    Channels are mean-subtracted so the filter is not dominated by the DC bin.
    """
    if kind is FeatureKind.HOG:
        raise ValueError("pyramid_stack is only defined for the deep kinds")
    gray = grids.to_gray(pixels)
    base = BLUR_RADIUS[kind]
    chans = [grids.box_blur(gray, base + j) for j in range(CHANNEL_COUNT[kind])]
    stack = grids.resize_stack(np.stack(chans), out_h, out_w)
    stack -= stack.mean(axis=(1, 2), keepdims=True)
    return FeatureStack(stack)


def synth_features(image: np.ndarray, patch: PatchSpec, kind: FeatureKind,
                   cell_size: int = 4) -> FeatureStack:
    """Feature stack for a patch at grid resolution floor(size/cell)."""
    if kind is FeatureKind.HOG:
        return extract_hog(image, patch, cell_size)
    ph = int(round(patch.height))
    pw = int(round(patch.width))
    gh, gw = ph // cell_size, pw // cell_size
    if gh < 1 or gw < 1:
        raise ValueError(f"patch {ph}x{pw} smaller than one {cell_size}px cell")
    img = np.asarray(image)
    scale = 255.0 if img.dtype == np.uint8 else 1.0
    pix = grids.extract_patch(img, patch.cx, patch.cy, patch.width, patch.height,
                              ph, pw) / scale
    return pyramid_stack(pix, kind, gh, gw)


__all__ = ["BLUR_RADIUS", "CHANNEL_COUNT", "pyramid_stack", "synth_features",
           "hog_features"]

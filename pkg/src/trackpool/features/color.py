"""Per-pixel foreground color scores for masking training samples.

A joint RGB histogram (bins per channel, Laplace +1 smoothed) is built over
the foreground box and over the rest of the patch; each patch pixel then gets
P(fg | color) = p_fg / (p_fg + p_bg). Identical distributions give 0.5
everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..boxes import BoundingBox, PatchSpec


@dataclass
class ColorMask:
    """Scores in (0, 1) at patch-pixel resolution."""
    grid: np.ndarray


def _pixel_rect(cx: float, cy: float, w: float, h: float, img_h: int, img_w: int):
    top = int(np.floor(cy - h / 2.0))
    left = int(np.floor(cx - w / 2.0))
    bottom = int(np.ceil(cy + h / 2.0))
    right = int(np.ceil(cx + w / 2.0))
    return (max(0, top), max(0, left), min(img_h, bottom), min(img_w, right))


def color_mask(image: np.ndarray, patch: PatchSpec, fg_box: BoundingBox,
               bins: int = 32) -> ColorMask:
    """Foreground posterior over the patch region of an RGB image."""
    if bins < 2:
        raise ValueError("need at least 2 bins per channel")
    img = np.asarray(image)
    if img.ndim == 2:
        img = img[:, :, None].repeat(3, axis=2)
    ih, iw = img.shape[:2]

    pt, pl, pb, pr = _pixel_rect(patch.cx, patch.cy, patch.width, patch.height, ih, iw)
    if pb - pt < 1 or pr - pl < 1:
        raise ValueError("patch region lies outside the image")
    ft, fl, fb, fr = _pixel_rect(fg_box.cx, fg_box.cy, fg_box.w, fg_box.h, ih, iw)
    ft, fl = max(ft, pt), max(fl, pl)
    fb, fr = min(fb, pb), min(fr, pr)
    if fb - ft < 1 or fr - fl < 1:
        raise ValueError("foreground box does not intersect the patch")

    region = img[pt:pb, pl:pr]
    if region.dtype == np.uint8:
        q = (region.astype(np.int64) * bins) >> 8
    else:
        q = np.clip((region * bins).astype(np.int64), 0, bins - 1)
    idx = (q[:, :, 0] * bins + q[:, :, 1]) * bins + q[:, :, 2]

    fg_sel = np.zeros(region.shape[:2], dtype=bool)
    fg_sel[ft - pt:fb - pt, fl - pl:fr - pl] = True

    n_cells = bins ** 3
    fg_counts = np.bincount(idx[fg_sel], minlength=n_cells).astype(np.float64)
    bg_idx = idx[~fg_sel]
    bg_counts = np.bincount(bg_idx, minlength=n_cells).astype(np.float64)

    p_fg = (fg_counts + 1.0) / (fg_sel.sum() + n_cells)
    p_bg = (bg_counts + 1.0) / (bg_idx.size + n_cells)
    posterior = p_fg / (p_fg + p_bg)
    return ColorMask(grid=posterior[idx])

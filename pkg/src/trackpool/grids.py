"""Raster helpers shared by feature extraction and sequence synthesis.

Two sampling conventions coexist, each pinned by its use:

* patch crops use half-pixel-center mapping with edge clamping, so regions
  reaching past the border replicate the edge row/column;
* whole-grid resizes use align-corners mapping, which reproduces a linear
  ramp exactly at every output sample.
"""
from __future__ import annotations

import numpy as np

_RGB_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_gray(image: np.ndarray) -> np.ndarray:
    """Luminance in [0, 1]; uint8 input is rescaled, float input is assumed [0, 1]."""
    a = np.asarray(image)
    scale = 255.0 if a.dtype == np.uint8 else 1.0
    a = a.astype(np.float64)
    if a.ndim == 3:
        a = a @ _RGB_WEIGHTS
    return a / scale


def bilinear_sample(img: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample img (H,W) or (H,W,C) at float positions, clamping to the border."""
    h, w = img.shape[:2]
    y0f = np.floor(ys)
    x0f = np.floor(xs)
    fy = ys - y0f
    fx = xs - x0f
    y0 = np.clip(y0f.astype(np.int64), 0, h - 1)
    y1 = np.clip(y0f.astype(np.int64) + 1, 0, h - 1)
    x0 = np.clip(x0f.astype(np.int64), 0, w - 1)
    x1 = np.clip(x0f.astype(np.int64) + 1, 0, w - 1)
    if img.ndim == 3:
        fy = fy[..., None]
        fx = fx[..., None]
    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def extract_patch(image: np.ndarray, cx: float, cy: float, w: float, h: float,
                  out_h: int, out_w: int) -> np.ndarray:
    """Crop the rect centered at (cx, cy) of size w x h to out_h x out_w.

    Half-pixel-center mapping; samples outside the image replicate the edge.
    """
    if w <= 0 or h <= 0 or out_h < 1 or out_w < 1:
        raise ValueError("patch and output sizes must be positive")
    img = np.asarray(image, dtype=np.float64)
    xs = (cx - w / 2.0) + (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    ys = (cy - h / 2.0) + (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    return bilinear_sample(img, ys[:, None], xs[None, :])


def _corner_positions(n_in: int, n_out: int) -> np.ndarray:
    if n_out == 1:
        return np.array([(n_in - 1) / 2.0])
    return np.arange(n_out) * ((n_in - 1) / (n_out - 1))


def resize_grid(grid: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Align-corners bilinear resize of a 2-D grid."""
    if out_h < 1 or out_w < 1:
        raise ValueError("output size must be positive")
    g = np.asarray(grid, dtype=np.float64)
    ys = _corner_positions(g.shape[0], out_h)
    xs = _corner_positions(g.shape[1], out_w)
    return bilinear_sample(g, ys[:, None], xs[None, :])


def resize_stack(stack: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Align-corners bilinear resize of a (C, H, W) stack."""
    s = np.asarray(stack, dtype=np.float64)
    if s.shape[1:] == (out_h, out_w):
        return s.copy()
    return np.stack([resize_grid(c, out_h, out_w) for c in s])


def sample_stack_rect(stack: np.ndarray, top: float, left: float,
                      bottom: float, right: float,
                      out_h: int, out_w: int) -> np.ndarray:
    """Crop a continuous rect from a (C, H, W) stack, half-pixel mapping, clamped."""
    if bottom <= top or right <= left:
        raise ValueError("empty rect")
    ys = top + (np.arange(out_h) + 0.5) * ((bottom - top) / out_h) - 0.5
    xs = left + (np.arange(out_w) + 0.5) * ((right - left) / out_w) - 0.5
    return np.stack([bilinear_sample(c, ys[:, None], xs[None, :]) for c in stack])


def box_blur(grid: np.ndarray, radius: int) -> np.ndarray:
    """Mean filter with a (2r+1) square window and replicated edges."""
    g = np.asarray(grid, dtype=np.float64)
    if radius <= 0:
        return g.copy()
    k = 2 * radius + 1
    p = np.pad(g, radius, mode="edge")
    # running sums along each axis via prepended-zero cumsum
    c = np.zeros((p.shape[0] + 1, p.shape[1]))
    np.cumsum(p, axis=0, out=c[1:])
    p = c[k:] - c[:-k]
    c = np.zeros((p.shape[0], p.shape[1] + 1))
    np.cumsum(p, axis=1, out=c[:, 1:])
    p = c[:, k:] - c[:, :-k]
    return p / float(k * k)
